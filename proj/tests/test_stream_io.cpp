#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "cod/stream_io.hpp"
#include "cod/verify.hpp"

using namespace cod;
using Eigen::MatrixXd;
using Eigen::VectorXd;
namespace fs = std::filesystem;
using verify::detail::random_stream;
using verify::detail::sketch_columns;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("cod_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

long vm_hwm_kb() {
    std::ifstream in("/proc/self/status");
    std::string line;
    while (std::getline(in, line))
        if (line.rfind("VmHWM:", 0) == 0)
            return std::strtol(line.c_str() + 6, nullptr, 10);
    return -1;
}

} // namespace

TEST_CASE("an empty stream is a 32-byte header", "[stream_io]") {
    TempDir tmp;
    const auto path = tmp.file("empty.cod");
    io::write_stream(path, MatrixXd(3, 0), MatrixXd(5, 0));
    CHECK(fs::file_size(path) == 32);

    io::StreamReader reader(path);
    CHECK(reader.header().mx == 3);
    CHECK(reader.header().my == 5);
    CHECK(reader.header().n == 0);
    CHECK(reader.read_batch(10).empty());
}

TEST_CASE("stream round-trip is bitwise", "[stream_io]") {
    TempDir tmp;
    auto [x, y] = random_stream(1, 7, 4, 33);
    const auto path = tmp.file("s.cod");
    io::write_stream(path, x, y);

    io::StreamReader reader(path);
    auto [x2, y2] = reader.read_all();
    CHECK(x2 == x);
    CHECK(y2 == y);

    const auto again = tmp.file("s2.cod");
    io::write_stream(again, x2, y2);
    CHECK(slurp(path) == slurp(again));
}

TEST_CASE("batch reads cover exactly the remainder", "[stream_io]") {
    TempDir tmp;
    auto [x, y] = random_stream(2, 3, 4, 10);
    const auto path = tmp.file("s.cod");
    io::write_stream(path, x, y);

    io::StreamReader reader(path);
    CHECK(reader.read_batch(4).size() == 4);
    CHECK(reader.read_batch(4).size() == 4);
    auto last = reader.read_batch(4);
    REQUIRE(last.size() == 2);
    CHECK(last[1].x == x.col(9));
    CHECK(last[1].y == y.col(9));
    CHECK(reader.read_batch(4).empty());
}

TEST_CASE("corruption surfaces as typed errors with byte offsets", "[stream_io]") {
    TempDir tmp;
    auto [x, y] = random_stream(3, 4, 6, 5);
    const auto path = tmp.file("s.cod");
    io::write_stream(path, x, y);
    const auto full = fs::file_size(path);

    SECTION("record truncated mid-way") {
        fs::resize_file(path, full - 13);
        io::StreamReader reader(path);
        reader.read_batch(3);
        try {
            reader.read_batch(3);
            FAIL("expected truncation error");
        } catch (const io::IoError& e) {
            CHECK(e.code() == io::IoError::Code::Truncated);
            CHECK(e.byte_offset() == full - 13);
        }
    }
    SECTION("header truncated") {
        fs::resize_file(path, 17);
        CHECK_THROWS_AS(io::StreamReader(path), io::IoError);
    }
    SECTION("wrong magic") {
        auto bytes = slurp(path);
        bytes[2] = 'X';
        std::ofstream(path, std::ios::binary) << bytes;
        try {
            io::StreamReader reader(path);
            FAIL("expected magic error");
        } catch (const io::IoError& e) {
            CHECK(e.code() == io::IoError::Code::BadMagic);
        }
    }
}

TEST_CASE("open-ended streams read until a clean record boundary", "[stream_io]") {
    TempDir tmp;
    auto [x, y] = random_stream(4, 3, 2, 7);
    const auto path = tmp.file("open.cod");
    io::write_stream(path, x, y);
    {
        // rewrite n with the open-ended sentinel
        std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
        f.seekp(24);
        const std::uint64_t sentinel = io::kOpenEndedCount;
        f.write(reinterpret_cast<const char*>(&sentinel), 8);
    }
    io::StreamReader reader(path);
    auto [x2, y2] = reader.read_all();
    CHECK(x2 == x);
    CHECK(y2 == y);
}

TEST_CASE("csv import produces the identical stream file", "[stream_io]") {
    TempDir tmp;
    auto [x, y] = random_stream(5, 4, 3, 9);

    auto write_csv = [&](const std::string& path, const MatrixXd& m) {
        std::ofstream out(path, std::ios::binary);
        for (Index i = 0; i < m.cols(); ++i) { // one sample per row
            for (Index d = 0; d < m.rows(); ++d) {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.17g", m(d, i));
                out << (d ? "," : "") << buf;
            }
            out << "\n";
        }
    };
    write_csv(tmp.file("x.csv"), x);
    write_csv(tmp.file("y.csv"), y);

    io::csv_import(tmp.file("x.csv"), tmp.file("y.csv"), tmp.file("fromcsv.cod"));
    io::write_stream(tmp.file("direct.cod"), x, y);
    CHECK(slurp(tmp.file("fromcsv.cod")) == slurp(tmp.file("direct.cod")));

    SECTION("ragged csv is rejected") {
        std::ofstream bad(tmp.file("bad.csv"));
        bad << "1,2,3\n1,2\n";
        bad.close();
        CHECK_THROWS_AS(io::read_csv_samples(tmp.file("bad.csv")), io::IoError);
    }
    SECTION("non-numeric csv is rejected") {
        std::ofstream bad(tmp.file("bad2.csv"));
        bad << "1,2\n1,oops\n";
        bad.close();
        CHECK_THROWS_AS(io::read_csv_samples(tmp.file("bad2.csv")), io::IoError);
    }
}

TEST_CASE("snapshot round-trips preserve the sketch bitwise", "[stream_io]") {
    TempDir tmp;
    const Index mx = 9, my = 7, ell = 4, n = 1000;
    auto [x, y] = random_stream(6, mx, my, n);
    auto a = sketch_columns(x.leftCols(n / 2), y.leftCols(n / 2), ell);
    auto b = sketch_columns(x.rightCols(n / 2), y.rightCols(n / 2), ell);

    io::save_sketch(tmp.file("a.snap"), io::snapshot_of(a));
    io::save_sketch(tmp.file("b.snap"), io::snapshot_of(b));

    SECTION("file-level round trip is bitwise") {
        auto loaded = io::load_sketch(tmp.file("a.snap"));
        io::save_sketch(tmp.file("a2.snap"), loaded);
        CHECK(slurp(tmp.file("a.snap")) == slurp(tmp.file("a2.snap")));
    }
    SECTION("merging restored snapshots matches the in-memory merge") {
        auto ra = io::restore(io::load_sketch(tmp.file("a.snap")));
        auto rb = io::restore(io::load_sketch(tmp.file("b.snap")));
        auto m1 = CoOccurringSketch::merge(a, b);
        auto m2 = CoOccurringSketch::merge(ra, rb);
        CHECK(m1.bx() == m2.bx());
        CHECK(m1.by() == m2.by());
        CHECK(m1.delta_log() == m2.delta_log());
        CHECK(m1.frob_x_sq() == m2.frob_x_sq());
    }
    SECTION("fresh sketch keeps its zero buffers") {
        CoOccurringSketch fresh({ell, mx, my});
        io::save_sketch(tmp.file("fresh.snap"), io::snapshot_of(fresh));
        auto back = io::load_sketch(tmp.file("fresh.snap"));
        CHECK(back.bx.isZero(0.0));
        CHECK(back.by.isZero(0.0));
        CHECK(back.fill == 0);
        CHECK(back.delta_log.empty());
    }
    SECTION("bumped version byte is rejected") {
        auto bytes = slurp(tmp.file("a.snap"));
        bytes[8] = static_cast<char>(bytes[8] + 1);
        std::ofstream(tmp.file("v.snap"), std::ios::binary) << bytes;
        try {
            io::load_sketch(tmp.file("v.snap"));
            FAIL("expected version error");
        } catch (const io::IoError& e) {
            CHECK(e.code() == io::IoError::Code::BadVersion);
            CHECK(e.byte_offset() == 8);
        }
    }
    SECTION("truncated snapshot is typed corruption") {
        const auto sz = fs::file_size(tmp.file("a.snap"));
        fs::resize_file(tmp.file("a.snap"), sz - 9);
        try {
            io::load_sketch(tmp.file("a.snap"));
            FAIL("expected truncation error");
        } catch (const io::IoError& e) {
            CHECK(e.code() == io::IoError::Code::Truncated);
            CHECK(e.byte_offset() == sz - 9);
        }
    }
}

TEST_CASE("reading a large stream uses batch-sized memory", "[stream_io]") {
    TempDir tmp;
    const Index mx = 4, my = 6, batch = 1024;
    const std::int64_t n = 1'000'000; // 80 MB on disk
    const auto path = tmp.file("big.cod");
    {
        io::StreamWriter w(path, mx, my);
        VectorXd x(mx), y(my);
        for (std::int64_t i = 0; i < n; ++i) {
            const double v = static_cast<double>(i % 613);
            x.setConstant(v);
            y.setConstant(-v);
            w.append(x, y);
        }
        w.close();
    }
    REQUIRE(fs::file_size(path) == 32 + static_cast<std::uintmax_t>(n) * (mx + my) * 8);

    const long before = vm_hwm_kb();
    std::int64_t seen = 0;
    double checksum = 0.0;
    io::StreamReader reader(path);
    for (;;) {
        auto pairs = reader.read_batch(batch);
        if (pairs.empty())
            break;
        seen += static_cast<std::int64_t>(pairs.size());
        checksum += pairs.back().x(0);
    }
    const long after = vm_hwm_kb();
    CHECK(seen == n);
    CHECK(checksum != 0.0);
    if (before > 0 && after > 0) {
        // peak growth stays far below the 80 MB payload
        CHECK(after - before < 20'000);
    }
}
