#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include <json.hpp>

#include "qpm/config.hpp"
#include "qpm/io.hpp"
#include "qpm/manifest.hpp"
#include "qpm/poling.hpp"

using namespace qpm;
namespace fs = std::filesystem;

namespace {
struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path()
               / ("qpm_test_" + std::to_string(::getpid()) + "_"
                  + std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
};
} // namespace

TEST_CASE("sequence file round trip is bit exact") {
    TempDir tmp;
    auto seq = periodic_sequence(3.0e6, 14998.9);
    seq.domains[7].width_nm = 7123.456789012345;  // exercise full precision
    fs::path p = tmp.path / "seq.txt";
    save_sequence(seq, p);
    auto loaded = load_sequence(p);
    REQUIRE(loaded.size() == seq.size());
    CHECK(loaded.nominal_width_nm == seq.nominal_width_nm);
    CHECK(loaded.carrier_k == seq.carrier_k);
    for (std::size_t j = 0; j < seq.size(); ++j) {
        CHECK(loaded.domains[j].sign == seq.domains[j].sign);
        CHECK(loaded.domains[j].width_nm == seq.domains[j].width_nm);
    }
    CHECK_THROWS_WITH(load_sequence(tmp.path / "missing.txt"),
                      Catch::Matchers::ContainsSubstring("not found"));
}

TEST_CASE("matrix csv round trip") {
    TempDir tmp;
    std::vector<double> rows{1.0, 2.0}, cols{10.0, 20.0, 30.0};
    std::vector<double> vals{0.1, -0.2, 0.3,
                             1234.5678901234567, 5e-300, -1.0};
    fs::path p = tmp.path / "m.csv";
    write_matrix_csv(p, "r\\c", rows, cols, vals);
    auto m = read_matrix_csv(p);
    CHECK(m.row_axis == rows);
    CHECK(m.col_axis == cols);
    for (std::size_t i = 0; i < vals.size(); ++i) CHECK(m.values[i] == vals[i]);
}

TEST_CASE("heatmap ppm output") {
    TempDir tmp;
    fs::path p = tmp.path / "img.ppm";

    SECTION("constant matrix renders uniformly") {
        write_heatmap_ppm(p, {3.5, 3.5, 3.5, 3.5}, 2, 2);
        std::string content = read_text_file(p);
        REQUIRE(content.substr(0, 3) == "P6\n");
        std::string body = content.substr(content.find("255\n") + 4);
        REQUIRE(body.size() == 12u);
        for (std::size_t i = 3; i < body.size(); ++i)
            CHECK(body[i] == body[i % 3]);
    }

    SECTION("2x2 reference bytes from the documented colormap") {
        // values {0, 1, 1, 0} -> t = {0, 1, 1, 0}; stops: t=0 -> (13, 8, 135),
        // t=1 -> (240, 249, 33)
        write_heatmap_ppm(p, {0.0, 1.0, 1.0, 0.0}, 2, 2);
        std::string content = read_text_file(p);
        std::string body = content.substr(content.find("255\n") + 4);
        const unsigned char lo[3] = {13, 8, 135}, hi[3] = {240, 249, 33};
        const unsigned char* exp[4] = {lo, hi, hi, lo};
        for (int px = 0; px < 4; ++px)
            for (int c = 0; c < 3; ++c)
                CHECK(static_cast<unsigned char>(body[static_cast<std::size_t>(px * 3 + c)])
                      == exp[px][c]);
    }

    SECTION("non-finite values are rejected with the index named") {
        CHECK_THROWS_WITH(write_heatmap_ppm(p, {0.0, std::nan(""), 1.0, 2.0}, 2, 2),
                          Catch::Matchers::ContainsSubstring("index 1"));
    }
}

TEST_CASE("colormap midpoint interpolation is linear between stops") {
    unsigned char rgb[3];
    colormap_rgb(0.125, rgb);  // halfway between stop 0 and stop 1
    CHECK(static_cast<int>(rgb[0]) == std::lround((13 + 126) / 2.0));
    CHECK(static_cast<int>(rgb[1]) == std::lround((8 + 3) / 2.0));
    CHECK(static_cast<int>(rgb[2]) == std::lround((135 + 168) / 2.0));
}

TEST_CASE("config parsing: defaults, strictness, pointed errors") {
    TempDir tmp;
    fs::path p = tmp.path / "cfg.json";

    SECTION("minimal config parses to the reference parameters") {
        write_text_file(p, "{}");
        auto cfg = parse_config(p);
        CHECK(cfg.target_kind == "comb");
        CHECK(cfg.tooth_pairs == 5);
        CHECK(cfg.crystal_length_nm == Catch::Approx(3.0e7));  // default 30 mm
        CHECK(cfg.pump.center_nm == Catch::Approx(1603.8));
        CHECK(cfg.pump.fwhm_nm == Catch::Approx(2.50));
        CHECK(cfg.grid.size == 512);
        CHECK(cfg.grid.center_nm == Catch::Approx(3207.6));
        CHECK(cfg.rate.sigma_p_um == Catch::Approx(50.0));
        CHECK(cfg.d_ref_pm_v == Catch::Approx(-4.6));
        CHECK(cfg.repetitions == 100);
        CHECK(cfg.resolutions_nm == std::vector<double>{0, 50, 100, 200, 400});
    }

    SECTION("unknown keys are rejected with their path") {
        write_text_file(p, R"({"grid": {"sise": 512}})");
        CHECK_THROWS_WITH(parse_config(p),
                          Catch::Matchers::ContainsSubstring("grid.sise"));
    }

    SECTION("malformed numbers name the field") {
        write_text_file(p, R"({"pump": {"fwhm_nm": "wide"}})");
        CHECK_THROWS_WITH(parse_config(p),
                          Catch::Matchers::ContainsSubstring("pump.fwhm_nm"));
    }

    SECTION("json syntax errors carry the file name") {
        write_text_file(p, "{");
        CHECK_THROWS_WITH(parse_config(p),
                          Catch::Matchers::ContainsSubstring("cfg.json"));
    }

    SECTION("invariants enforced at parse time") {
        write_text_file(p, R"({"grid": {"size": 100}})");
        CHECK_THROWS_AS(parse_config(p), std::invalid_argument);
        write_text_file(p, R"({"tolerance": {"repetitions": 1}})");
        CHECK_THROWS_AS(parse_config(p), std::invalid_argument);
        write_text_file(p, R"({"target": {"kind": "triangle"}})");
        CHECK_THROWS_AS(parse_config(p), std::invalid_argument);
    }

    SECTION("config hash is stable across reparses") {
        write_text_file(p, R"({"pump": {"fwhm_nm": 3.0}})");
        auto a = config_to_json(parse_config(p)).dump();
        auto b = config_to_json(parse_config(p)).dump();
        CHECK(fnv1a64_hex(a) == fnv1a64_hex(b));
    }
}

TEST_CASE("manifest records and verifies artifacts") {
    TempDir tmp;
    RunConfig cfg;
    cfg.output_dir = tmp.path.string();
    RunManifest man(cfg, tmp.path);
    write_text_file(tmp.path / "a.csv", "x,y\n1,2\n");
    man.add(tmp.path / "a.csv");
    man.write();
    CHECK(RunManifest::verify(tmp.path));
    // corrupting the artifact breaks verification
    write_text_file(tmp.path / "a.csv", "x,y\n1,3\n");
    CHECK_FALSE(RunManifest::verify(tmp.path));
}

TEST_CASE("output lock excludes concurrent runs") {
    TempDir tmp;
    fs::path dir = tmp.path / "out";
    {
        OutputLock lock(dir);
        CHECK_THROWS_AS(OutputLock(dir), std::runtime_error);
    }
    OutputLock relock(dir);  // released on destruction
}
