#pragma once

//
// On-disk formats. Both are little-endian and bit-exact: write/read
// round-trips reproduce payloads bitwise, and any structural damage surfaces
// as a typed IoError with the byte offset where it was detected.
//
// Paired-column stream (.cod):
//   bytes 0..7    tag "CODSTRM1" -- the trailing byte doubles as the payload
//                 format tag: '1' = 64-bit IEEE little-endian records
//   bytes 8..31   mx, my, n as unsigned 64-bit LE; n = 2^64-1 marks an
//                 open-ended stream (read until EOF)
//   then n records, each mx doubles of X_i followed by my doubles of Y_i.
//
// Sketch snapshot (.snap):
//   tag "CODSNAP0", u64 version, u64 ell/mx/my/fill/columns_seen,
//   f64 frob_x_sq/frob_y_sq, u64 delta count + deltas,
//   then bx (mx*ell doubles, column-major) and by (my*ell doubles).
//
// Records interleave X_i with Y_i so one sequential pass yields pairs;
// readers hold only the current batch, never the full matrices.
//

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "cod/cooccurring.hpp"
#include "cod/sketch_types.hpp"

namespace cod::io {

inline constexpr std::array<char, 8> kStreamMagic = {'C', 'O', 'D', 'S', 'T', 'R', 'M', '1'};
inline constexpr std::array<char, 8> kSnapshotMagic = {'C', 'O', 'D', 'S', 'N', 'A', 'P', '0'};
inline constexpr std::uint64_t kSnapshotVersion = 1;
inline constexpr std::uint64_t kOpenEndedCount = ~static_cast<std::uint64_t>(0);
inline constexpr std::size_t kStreamHeaderBytes = 32;

struct StreamHeader {
    std::uint64_t mx = 0;
    std::uint64_t my = 0;
    std::uint64_t n = 0;

    std::size_t record_bytes() const { return static_cast<std::size_t>(mx + my) * 8; }
};

namespace detail {

inline bool host_is_little_endian() {
    const std::uint16_t probe = 1;
    unsigned char b;
    std::memcpy(&b, &probe, 1);
    return b == 1;
}

inline std::uint64_t to_le(std::uint64_t v) {
    return host_is_little_endian() ? v : __builtin_bswap64(v);
}

struct Writer {
    std::ofstream out;
    std::uint64_t offset = 0;
    std::string path;

    Writer(const std::string& p, std::ios::openmode extra = {})
        : out(p, std::ios::binary | extra), path(p) {
        if (!out)
            throw IoError(IoError::Code::OpenFailed, 0, "cannot open " + p + " for writing");
    }

    void bytes(const void* data, std::size_t len) {
        out.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
        if (!out)
            throw IoError(IoError::Code::WriteFailed, offset, "write failed at " + path);
        offset += len;
    }

    void u64(std::uint64_t v) {
        const std::uint64_t le = to_le(v);
        bytes(&le, 8);
    }

    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        u64(bits);
    }

    void f64_block(const double* data, std::size_t count) {
        if (host_is_little_endian()) {
            bytes(data, count * 8);
        } else {
            for (std::size_t i = 0; i < count; ++i)
                f64(data[i]);
        }
    }
};

struct Reader {
    std::ifstream in;
    std::uint64_t offset = 0;
    std::string path;

    explicit Reader(const std::string& p) : in(p, std::ios::binary), path(p) {
        if (!in)
            throw IoError(IoError::Code::OpenFailed, 0, "cannot open " + p + " for reading");
    }

    // Read exactly len bytes or throw Truncated at the current offset.
    void bytes(void* data, std::size_t len) {
        in.read(static_cast<char*>(data), static_cast<std::streamsize>(len));
        if (static_cast<std::size_t>(in.gcount()) != len)
            throw IoError(IoError::Code::Truncated, offset + static_cast<std::uint64_t>(in.gcount()),
                          path + " is truncated at byte " +
                              std::to_string(offset + static_cast<std::uint64_t>(in.gcount())));
        offset += len;
    }

    // Returns false on clean EOF at the current position, throws mid-object.
    bool bytes_or_eof(void* data, std::size_t len) {
        in.read(static_cast<char*>(data), static_cast<std::streamsize>(len));
        const auto got = static_cast<std::size_t>(in.gcount());
        if (got == 0 && in.eof())
            return false;
        if (got != len)
            throw IoError(IoError::Code::Truncated, offset + got,
                          path + " is truncated at byte " + std::to_string(offset + got));
        offset += len;
        return true;
    }

    std::uint64_t u64() {
        std::uint64_t v;
        bytes(&v, 8);
        return to_le(v);
    }

    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }

    void f64_block(double* data, std::size_t count) {
        if (host_is_little_endian()) {
            bytes(data, count * 8);
        } else {
            for (std::size_t i = 0; i < count; ++i)
                data[i] = f64();
        }
    }
};

} // namespace detail

//
// Streaming writer; n is patched into the header on close, so open-ended
// writes still end up with an exact count.
//
class StreamWriter {
public:
    StreamWriter(const std::string& path, Index mx, Index my)
        : writer_(path, std::ios::trunc), mx_(mx), my_(my) {
        if (mx <= 0 || my <= 0)
            throw InvalidConfig(InvalidConfig::Code::NonPositiveDim,
                                "matrix dimensions must be positive");
        writer_.bytes(kStreamMagic.data(), kStreamMagic.size());
        writer_.u64(static_cast<std::uint64_t>(mx));
        writer_.u64(static_cast<std::uint64_t>(my));
        writer_.u64(kOpenEndedCount);
    }

    void append(const Eigen::Ref<const Eigen::VectorXd>& x,
                const Eigen::Ref<const Eigen::VectorXd>& y) {
        cod::detail::require_length(x, mx_, "x column");
        cod::detail::require_length(y, my_, "y column");
        writer_.f64_block(x.data(), static_cast<std::size_t>(mx_));
        writer_.f64_block(y.data(), static_cast<std::size_t>(my_));
        ++count_;
    }

    void close() {
        if (closed_)
            return;
        writer_.out.flush();
        writer_.out.seekp(24);
        writer_.u64(count_);
        writer_.out.flush();
        if (!writer_.out)
            throw IoError(IoError::Code::WriteFailed, 24, "failed to finalize stream header");
        writer_.out.close();
        closed_ = true;
    }

    ~StreamWriter() {
        try {
            close();
        } catch (...) {
        }
    }

    std::uint64_t count() const { return count_; }

private:
    detail::Writer writer_;
    Index mx_, my_;
    std::uint64_t count_ = 0;
    bool closed_ = false;
};

inline void write_stream(const std::string& path, const Eigen::Ref<const Eigen::MatrixXd>& x,
                         const Eigen::Ref<const Eigen::MatrixXd>& y) {
    if (x.cols() != y.cols())
        throw DimensionMismatch("X and Y must have the same number of columns");
    StreamWriter w(path, x.rows(), y.rows());
    for (Index i = 0; i < x.cols(); ++i)
        w.append(x.col(i), y.col(i));
    w.close();
}

class StreamReader {
public:
    explicit StreamReader(const std::string& path) : reader_(path) {
        std::array<char, 8> magic{};
        reader_.bytes(magic.data(), magic.size());
        if (magic != kStreamMagic)
            throw IoError(IoError::Code::BadMagic, 0,
                          path + " is not a CODSTRM1 paired-column stream");
        header_.mx = reader_.u64();
        header_.my = reader_.u64();
        header_.n = reader_.u64();
        if (header_.mx == 0 || header_.my == 0)
            throw IoError(IoError::Code::Malformed, 8, path + " declares a zero dimension");
    }

    const StreamHeader& header() const { return header_; }
    Index mx() const { return static_cast<Index>(header_.mx); }
    Index my() const { return static_cast<Index>(header_.my); }

    // Up to batch_size pairs; an empty result signals end of stream. Memory
    // use is O(batch_size * (mx + my)) regardless of n.
    std::vector<ColumnPair> read_batch(Index batch_size) {
        std::vector<ColumnPair> batch;
        if (batch_size <= 0)
            return batch;
        const bool open_ended = header_.n == kOpenEndedCount;
        while (static_cast<Index>(batch.size()) < batch_size) {
            if (!open_ended && records_read_ == header_.n)
                break;
            ColumnPair pair;
            pair.x.resize(mx());
            pair.y.resize(my());
            if (open_ended) {
                // EOF is only clean on a record boundary
                std::uint64_t first;
                if (!reader_.bytes_or_eof(&first, 8))
                    break;
                first = detail::to_le(first);
                std::memcpy(pair.x.data(), &first, 8);
                reader_.f64_block(pair.x.data() + 1, static_cast<std::size_t>(mx() - 1));
            } else {
                reader_.f64_block(pair.x.data(), static_cast<std::size_t>(mx()));
            }
            reader_.f64_block(pair.y.data(), static_cast<std::size_t>(my()));
            ++records_read_;
            batch.push_back(std::move(pair));
        }
        return batch;
    }

    // Convenience for desk-scale oracles; concatenates everything.
    std::pair<Eigen::MatrixXd, Eigen::MatrixXd> read_all(Index batch_size = 1024) {
        std::vector<ColumnPair> all;
        for (;;) {
            auto batch = read_batch(batch_size);
            if (batch.empty())
                break;
            for (auto& p : batch)
                all.push_back(std::move(p));
        }
        Eigen::MatrixXd x(mx(), static_cast<Index>(all.size()));
        Eigen::MatrixXd y(my(), static_cast<Index>(all.size()));
        for (Index i = 0; i < static_cast<Index>(all.size()); ++i) {
            x.col(i) = all[static_cast<std::size_t>(i)].x;
            y.col(i) = all[static_cast<std::size_t>(i)].y;
        }
        return {std::move(x), std::move(y)};
    }

    std::uint64_t records_read() const { return records_read_; }

private:
    detail::Reader reader_;
    StreamHeader header_;
    std::uint64_t records_read_ = 0;
};

//
// Serialized sketch state. Round-trips are bitwise; `restore` rebuilds a
// live CoOccurringSketch for merging.
//
struct SketchSnapshot {
    std::uint64_t version = kSnapshotVersion;
    SketchConfig config;
    Index fill = 0;
    std::int64_t columns_seen = 0;
    double frob_x_sq = 0.0;
    double frob_y_sq = 0.0;
    std::vector<double> delta_log;
    Eigen::MatrixXd bx;
    Eigen::MatrixXd by;
};

inline SketchSnapshot snapshot_of(const CoOccurringSketch& sketch) {
    SketchSnapshot s;
    s.config = sketch.config();
    s.fill = sketch.fill();
    s.columns_seen = sketch.columns_seen();
    s.frob_x_sq = sketch.frob_x_sq();
    s.frob_y_sq = sketch.frob_y_sq();
    s.delta_log = sketch.delta_log();
    s.bx = sketch.bx();
    s.by = sketch.by();
    return s;
}

inline CoOccurringSketch restore(const SketchSnapshot& s) {
    return CoOccurringSketch::restore(s.config, s.bx, s.by, s.fill, s.columns_seen, s.frob_x_sq,
                                      s.frob_y_sq, s.delta_log);
}

inline void save_sketch(const std::string& path, const SketchSnapshot& s) {
    detail::Writer w(path, std::ios::trunc);
    w.bytes(kSnapshotMagic.data(), kSnapshotMagic.size());
    w.u64(s.version);
    w.u64(static_cast<std::uint64_t>(s.config.ell));
    w.u64(static_cast<std::uint64_t>(s.config.mx));
    w.u64(static_cast<std::uint64_t>(s.config.my));
    w.u64(static_cast<std::uint64_t>(s.fill));
    w.u64(static_cast<std::uint64_t>(s.columns_seen));
    w.f64(s.frob_x_sq);
    w.f64(s.frob_y_sq);
    w.u64(s.delta_log.size());
    w.f64_block(s.delta_log.data(), s.delta_log.size());
    w.f64_block(s.bx.data(), static_cast<std::size_t>(s.bx.size()));
    w.f64_block(s.by.data(), static_cast<std::size_t>(s.by.size()));
}

inline SketchSnapshot load_sketch(const std::string& path) {
    detail::Reader r(path);
    std::array<char, 8> magic{};
    r.bytes(magic.data(), magic.size());
    if (magic != kSnapshotMagic)
        throw IoError(IoError::Code::BadMagic, 0, path + " is not a CODSNAP0 sketch snapshot");
    SketchSnapshot s;
    s.version = r.u64();
    if (s.version != kSnapshotVersion)
        throw IoError(IoError::Code::BadVersion, 8,
                      path + " has snapshot version " + std::to_string(s.version) +
                          ", expected " + std::to_string(kSnapshotVersion));
    s.config.ell = static_cast<Index>(r.u64());
    s.config.mx = static_cast<Index>(r.u64());
    s.config.my = static_cast<Index>(r.u64());
    s.fill = static_cast<Index>(r.u64());
    s.columns_seen = static_cast<std::int64_t>(r.u64());
    s.frob_x_sq = r.f64();
    s.frob_y_sq = r.f64();
    const std::uint64_t ndelta = r.u64();
    s.delta_log.resize(ndelta);
    r.f64_block(s.delta_log.data(), s.delta_log.size());
    s.bx.resize(s.config.mx, s.config.ell);
    s.by.resize(s.config.my, s.config.ell);
    r.f64_block(s.bx.data(), static_cast<std::size_t>(s.bx.size()));
    r.f64_block(s.by.data(), static_cast<std::size_t>(s.by.size()));
    return s;
}

//
// CSV ingestion: one sample per row, so row i of the file is X_i^T (resp.
// Y_i^T); the pair of files must agree on the row count.
//
inline Eigen::MatrixXd read_csv_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError(IoError::Code::OpenFailed, 0, "cannot open " + path + " for reading");
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::vector<double> fields;
        const char* p = line.c_str();
        for (;;) {
            char* end = nullptr;
            const double v = std::strtod(p, &end);
            if (end == p)
                throw IoError(IoError::Code::Malformed, 0,
                              path + ":" + std::to_string(lineno) + ": expected a number");
            fields.push_back(v);
            p = end;
            while (*p == ' ' || *p == '\t')
                ++p;
            if (*p == ',') {
                ++p;
                continue;
            }
            if (*p == '\0')
                break;
            throw IoError(IoError::Code::Malformed, 0,
                          path + ":" + std::to_string(lineno) + ": unexpected character '" +
                              std::string(1, *p) + "'");
        }
        if (!rows.empty() && fields.size() != rows.front().size())
            throw IoError(IoError::Code::Malformed, 0,
                          path + ":" + std::to_string(lineno) + ": ragged row (" +
                              std::to_string(fields.size()) + " fields, expected " +
                              std::to_string(rows.front().size()) + ")");
        rows.push_back(std::move(fields));
    }
    if (rows.empty())
        throw IoError(IoError::Code::Malformed, 0, path + " contains no samples");
    // samples become columns
    Eigen::MatrixXd m(static_cast<Index>(rows.front().size()), static_cast<Index>(rows.size()));
    for (Index i = 0; i < m.cols(); ++i)
        for (Index d = 0; d < m.rows(); ++d)
            m(d, i) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
    return m;
}

inline void csv_import(const std::string& csv_x, const std::string& csv_y,
                       const std::string& out_path) {
    const Eigen::MatrixXd x = read_csv_samples(csv_x);
    const Eigen::MatrixXd y = read_csv_samples(csv_y);
    if (x.cols() != y.cols())
        throw DimensionMismatch("CSV files disagree on the sample count: " +
                                std::to_string(x.cols()) + " vs " + std::to_string(y.cols()));
    write_stream(out_path, x, y);
}

} // namespace cod::io
