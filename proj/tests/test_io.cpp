#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "pansharp/io.hpp"
#include "test_util.hpp"

using namespace pansharp;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "pansharp_io_tests";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

void spit(const fs::path& p, const std::string& data) {
    std::ofstream out(p, std::ios::binary);
    out << data;
}

}  // namespace

TEST_CASE("PGM round trip is lossless at both bit depths") {
    const fs::path dir = scratch_dir();
    const RasterBand b8(3, 2, {0, 1, 127, 128, 254, 255});
    save_band(b8, dir / "b8.pgm", 255);
    REQUIRE(max_abs_diff(load_band(dir / "b8.pgm"), b8) == 0.0);

    const RasterBand b16(3, 2, {0, 1, 258, 32768, 65534, 65535});
    save_band(b16, dir / "b16.pgm", 65535);
    REQUIRE(max_abs_diff(load_band(dir / "b16.pgm"), b16) == 0.0);

    // a second save of the loaded band reproduces the file byte for byte
    save_band(load_band(dir / "b16.pgm"), dir / "b16_again.pgm", 65535);
    REQUIRE(slurp(dir / "b16.pgm") == slurp(dir / "b16_again.pgm"));
}

TEST_CASE("PGM save clips and rounds; 16-bit data is big-endian") {
    const fs::path dir = scratch_dir();
    const RasterBand b(2, 2, {-5.0, 0.4, 258.0, 70000.0});
    save_band(b, dir / "layout.pgm", 65535);

    const std::string expected = std::string("P5\n2 2\n65535\n") +
                                 std::string({'\x00', '\x00', '\x00', '\x00',
                                              '\x01', '\x02', '\xff', '\xff'});
    REQUIRE(slurp(dir / "layout.pgm") == expected);

    REQUIRE_THROWS_AS(save_band(b, dir / "bad.pgm", 1024), ParameterError);
}

TEST_CASE("PGM loader handles comments and rejects malformed input") {
    const fs::path dir = scratch_dir();
    spit(dir / "comment.pgm", "P5\n# a comment\n2 1\n# another\n255\n\x07\x08");
    const RasterBand b = load_band(dir / "comment.pgm");
    REQUIRE(b.width() == 2);
    REQUIRE(b.at(0, 0) == 7.0);
    REQUIRE(b.at(1, 0) == 8.0);

    spit(dir / "magic.pgm", "P6\n2 1\n255\n\x07\x08");
    REQUIRE_THROWS_AS(load_band(dir / "magic.pgm"), IoError);
    spit(dir / "short.pgm", "P5\n4 4\n255\nxy");
    REQUIRE_THROWS_AS(load_band(dir / "short.pgm"), IoError);
    spit(dir / "header.pgm", "P5\n2 junk\n255\n\x07\x08");
    REQUIRE_THROWS_AS(load_band(dir / "header.pgm"), IoError);
    REQUIRE_THROWS_AS(load_band(dir / "missing.pgm"), IoError);
}

TEST_CASE("multiband manifest round trip and validation") {
    const fs::path dir = scratch_dir() / "mb";
    ps_test::TestRng rng(3);
    std::vector<RasterBand> bands;
    for (int i = 0; i < 3; ++i) {
        std::vector<double> v(12 * 10);
        for (double& x : v) x = static_cast<double>(rng.integer(0, 65535));
        bands.emplace_back(12, 10, std::move(v));
    }
    const MultiBandImage image(std::move(bands));
    save_multiband(image, dir / "scene.txt");

    const MultiBandImage loaded = load_multiband(dir / "scene.txt");
    REQUIRE(loaded.band_count() == 3);
    for (int i = 0; i < 3; ++i)
        REQUIRE(max_abs_diff(loaded.band(i), image.band(i)) == 0.0);

    SECTION("comments and blank lines are accepted") {
        spit(dir / "commented.txt",
             "# fused scene\n\nband=scene_b1.pgm\n  band=scene_b2.pgm\n");
        REQUIRE(load_multiband(dir / "commented.txt").band_count() == 2);
    }
    SECTION("dimension mismatch is an I/O error") {
        save_band(RasterBand(4, 4), dir / "small.pgm");
        spit(dir / "bad_dims.txt", "band=scene_b1.pgm\nband=small.pgm\n");
        REQUIRE_THROWS_AS(load_multiband(dir / "bad_dims.txt"), IoError);
    }
    SECTION("malformed lines and empty manifests are I/O errors") {
        spit(dir / "malformed.txt", "banana=scene_b1.pgm\n");
        REQUIRE_THROWS_AS(load_multiband(dir / "malformed.txt"), IoError);
        spit(dir / "empty.txt", "# nothing here\n");
        REQUIRE_THROWS_AS(load_multiband(dir / "empty.txt"), IoError);
        REQUIRE_THROWS_AS(load_multiband(dir / "nope.txt"), IoError);
    }
}

TEST_CASE("unwritable destinations surface as I/O errors") {
    const RasterBand b(2, 2, {1, 2, 3, 4});
    REQUIRE_THROWS_AS(save_band(b, "/proc/pansharp_nope/x.pgm"), IoError);
    REQUIRE_THROWS_AS(save_multiband(MultiBandImage(std::vector<RasterBand>{b}),
                                     "/proc/pansharp_nope/m.txt"),
                      IoError);
}

TEST_CASE("f32 raw export round trips at float precision") {
    const fs::path dir = scratch_dir();
    const RasterBand b(3, 2, {0.0, -1.5, 3.25, 1e-7, 12345.678, 2.0});
    save_band_f32(b, dir / "plane.f32");

    const RasterBand loaded = load_band_f32(dir / "plane.f32");
    REQUIRE(loaded.same_dims(b));
    for (std::size_t i = 0; i < b.size(); ++i)
        REQUIRE(loaded.samples()[i] == static_cast<double>(static_cast<float>(b.samples()[i])));

    save_band_f32(loaded, dir / "plane2.f32");
    REQUIRE(slurp(dir / "plane.f32") == slurp(dir / "plane2.f32"));

    SECTION("sidecar validation") {
        spit(dir / "bad.f32", std::string(8, '\0'));
        spit(dir / "bad.f32.hdr", "width=2\nheight=2\ndtype=f32\n");
        REQUIRE_THROWS_AS(load_band_f32(dir / "bad.f32"), IoError);  // size mismatch
        spit(dir / "bad2.f32", std::string(16, '\0'));
        spit(dir / "bad2.f32.hdr", "width=2\nheight=2\ndtype=f64\n");
        REQUIRE_THROWS_AS(load_band_f32(dir / "bad2.f32"), IoError);
        spit(dir / "bad3.f32", std::string(16, '\0'));
        spit(dir / "bad3.f32.hdr", "width=junk height=2 dtype=f32\n");
        REQUIRE_THROWS_AS(load_band_f32(dir / "bad3.f32"), IoError);
    }
}
