#pragma once

#include "pansharp/atrous.hpp"
#include "pansharp/errors.hpp"
#include "pansharp/fusion.hpp"
#include "pansharp/harness.hpp"
#include "pansharp/io.hpp"
#include "pansharp/jacobi.hpp"
#include "pansharp/metrics.hpp"
#include "pansharp/raster.hpp"
#include "pansharp/resample.hpp"
