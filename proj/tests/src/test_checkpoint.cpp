#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ipmlab/checkpoint.hpp"
#include "ipmlab/errors.hpp"
#include "ipmlab/fft.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

using namespace ipm;

namespace {

SpectralField random_field(const Grid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist;
    std::vector<double> phys(g.size());
    for (double& v : phys) v = dist(rng);
    return transform_forward(phys, g);
}

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

struct FileGuard {
    std::string path;
    ~FileGuard() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("checkpoints round trip bit-exactly") {
    for (int dim : {2, 3}) {
        const Grid g(dim, dim == 2 ? 32 : 8);
        const SpectralField f = random_field(g, 7);
        const std::string path = temp_path(dim == 2 ? "ckpt_rt2.bin" : "ckpt_rt3.bin");
        FileGuard guard{path};

        write_checkpoint(path, f);
        const Checkpoint plain = read_checkpoint(path);
        CHECK(plain.field.grid() == g);
        CHECK(!plain.meta.has_value());
        for (std::size_t i = 0; i < f.size(); ++i) CHECK(plain.field[i] == f[i]);

        SimMeta meta{1.25, 37, 99, 0xdeadbeefcafe1234ull};
        write_checkpoint(path, f, meta);
        const Checkpoint with = read_checkpoint(path);
        REQUIRE(with.meta.has_value());
        CHECK(with.meta->t == 1.25);
        CHECK(with.meta->step == 37);
        CHECK(with.meta->seed == 99);
        CHECK(with.meta->config_hash == 0xdeadbeefcafe1234ull);
        for (std::size_t i = 0; i < f.size(); ++i) CHECK(with.field[i] == f[i]);
    }
}

TEST_CASE("corrupt checkpoints are rejected") {
    const Grid g(2, 16);
    const SpectralField f = random_field(g, 8);
    const std::string path = temp_path("ckpt_bad.bin");
    FileGuard guard{path};
    write_checkpoint(path, f);

    SUBCASE("flipped magic byte") {
        std::fstream s(path, std::ios::in | std::ios::out | std::ios::binary);
        s.seekp(0);
        s.put('X');
        s.close();
        CHECK_THROWS_AS(read_checkpoint(path), IntegrityError);
    }

    SUBCASE("truncation") {
        const auto size = std::filesystem::file_size(path);
        std::filesystem::resize_file(path, size - 16);
        CHECK_THROWS_AS(read_checkpoint(path), IntegrityError);
    }

    SUBCASE("trailing garbage") {
        std::ofstream s(path, std::ios::app | std::ios::binary);
        s.write("junk", 4);
        s.close();
        CHECK_THROWS_AS(read_checkpoint(path), IntegrityError);
    }
}

TEST_CASE("missing checkpoint files raise a configuration error") {
    CHECK_THROWS_AS(read_checkpoint(temp_path("ckpt_never_written.bin")), ConfigError);
}
