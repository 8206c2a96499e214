//
// cod -- streaming approximate matrix multiplication toolkit.
//
// Subcommands:
//   gen     write a synthetic low-rank paired-column stream
//   sketch  one pass over a stream file with a chosen AMM method
//   bench   error/time sweep over methods x sketch lengths, CSV out
//   merge   fold sketch snapshots together (sketches of sketches)
//   verify  run the self-check battery
//
// Exit codes: 0 success, 1 verification/runtime failure, 2 usage error.
//

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "cod/cod.hpp"

namespace {

using cod::Index;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

cod::AmmMethod parse_method(const std::string& name) {
    using cod::AmmMethod;
    if (name == "cod") return AmmMethod::CoD;
    if (name == "fd-amm") return AmmMethod::FdAmm;
    if (name == "brute") return AmmMethod::Brute;
    if (name == "sampling") return AmmMethod::Sampling;
    if (name == "projection") return AmmMethod::Projection;
    if (name == "hashing") return AmmMethod::Hashing;
    throw cod::InvalidConfig(cod::InvalidConfig::Code::BadStats, "unknown method '" + name + "'");
}

void validate_ell_for(cod::AmmMethod method, Index ell, Index mx, Index my) {
    using cod::AmmMethod;
    switch (method) {
    case AmmMethod::CoD:
        cod::SketchConfig{ell, mx, my}.validate();
        break;
    case AmmMethod::FdAmm:
        cod::SketchConfig{ell, mx + my, mx + my}.validate();
        break;
    case AmmMethod::Brute:
        if (ell < 1)
            throw cod::InvalidConfig(cod::InvalidConfig::Code::EllTooSmall,
                                     "ell must be at least 1");
        if (ell > std::min(mx, my))
            throw cod::InvalidConfig(cod::InvalidConfig::Code::EllTooLarge,
                                     "ell exceeds min(mx,my)");
        break;
    default:
        if (ell < 1)
            throw cod::InvalidConfig(cod::InvalidConfig::Code::EllTooSmall,
                                     "ell must be at least 1");
    }
}

// ---------------------------------------------------------------- gen

struct GenArgs {
    Index n = 0, mx = 0, my = 0, kx = 0, ky = 0;
    double zeta_x = 0.0, zeta_y = 0.0; // 0 = no noise
    std::uint64_t seed = 0;
    std::string out;
};

int run_gen(const GenArgs& a) {
    cod::LowRankModelSpec spec;
    spec.n = a.n;
    spec.mx = a.mx;
    spec.my = a.my;
    spec.kx = a.kx;
    spec.ky = a.ky;
    if (a.zeta_x > 0.0)
        spec.zeta_x = a.zeta_x;
    if (a.zeta_y > 0.0)
        spec.zeta_y = a.zeta_y;
    spec.seed = a.seed;
    spec.validate();

    auto [x, y] = cod::gen_low_rank(spec);
    cod::io::write_stream(a.out, x, y);
    std::cout << "gen n=" << spec.n << " mx=" << spec.mx << " my=" << spec.my
              << " kx=" << spec.kx << " ky=" << spec.ky << " zeta_x="
              << (spec.zeta_x ? fmt(*spec.zeta_x) : "none") << " zeta_y="
              << (spec.zeta_y ? fmt(*spec.zeta_y) : "none") << " seed=" << spec.seed
              << " out=" << a.out << "\n";
    return 0;
}

// ---------------------------------------------------------------- sketch

struct SketchArgs {
    std::string in, algo, out;
    Index ell = 0;
    std::uint64_t seed = 0;
    Index batch = 1024;
    bool audit = false;
    bool force = false;
    bool unscaled = false;
};

struct StreamedResult {
    cod::AmmSketch sketch;
    double wall_time_s = 0.0;
    std::uint64_t n = 0;
    double frob_x_sq = 0.0, frob_y_sq = 0.0;
    std::optional<cod::io::SketchSnapshot> cod_snapshot;
};

// One pass over the stream file; only the current batch is resident.
StreamedResult stream_method(const std::string& path, cod::AmmMethod method, Index ell,
                             std::uint64_t seed, Index batch, bool unscaled) {
    cod::io::StreamReader reader(path);
    const Index mx = reader.mx(), my = reader.my();
    validate_ell_for(method, ell, mx, my);

    StreamedResult out;
    const auto t0 = Clock::now();

    auto drive = [&](auto& estimator) {
        for (;;) {
            auto pairs = reader.read_batch(batch);
            if (pairs.empty())
                break;
            for (const auto& p : pairs) {
                estimator.update(p.x, p.y);
                out.frob_x_sq += p.x.squaredNorm();
                out.frob_y_sq += p.y.squaredNorm();
                ++out.n;
            }
        }
    };

    using cod::AmmMethod;
    switch (method) {
    case AmmMethod::CoD: {
        cod::CoOccurringSketch s({ell, mx, my});
        drive(s);
        out.sketch = {s.bx(), s.by()};
        out.cod_snapshot = cod::io::snapshot_of(s);
        break;
    }
    case AmmMethod::FdAmm: {
        cod::FdAmm s(ell, mx, my);
        drive(s);
        out.sketch = s.result();
        break;
    }
    case AmmMethod::Brute: {
        cod::BruteForceAmm s(ell, mx, my);
        drive(s);
        out.sketch = s.result();
        break;
    }
    case AmmMethod::Sampling: {
        cod::SamplingAmm s(ell, mx, my, seed, !unscaled);
        drive(s);
        out.sketch = s.result();
        if (s.all_zero())
            std::cerr << "warning: all column weights were zero; sketch is zero\n";
        break;
    }
    case AmmMethod::Projection: {
        cod::ProjectionAmm s(ell, mx, my, seed);
        drive(s);
        out.sketch = s.result();
        break;
    }
    case AmmMethod::Hashing: {
        cod::HashingAmm s(ell, mx, my, seed);
        drive(s);
        out.sketch = s.result();
        break;
    }
    }
    out.wall_time_s = seconds_since(t0);
    return out;
}

double reference_bound(cod::AmmMethod method, Index ell, double frob_x_sq, double frob_y_sq) {
    using cod::AmmMethod;
    const double fx = std::sqrt(frob_x_sq), fy = std::sqrt(frob_y_sq);
    switch (method) {
    case AmmMethod::CoD:
        return 2.0 * fx * fy / static_cast<double>(ell);
    case AmmMethod::FdAmm:
        return (frob_x_sq + frob_y_sq) / static_cast<double>(ell);
    default:
        // randomized reference scale eps*||X||_F*||Y||_F at ell = 1/eps^2;
        // brute gets sigma_{ell+1} under --audit instead
        return fx * fy / std::sqrt(static_cast<double>(ell));
    }
}

int run_sketch(const SketchArgs& a) {
    const cod::AmmMethod method = parse_method(a.algo);
    auto res = stream_method(a.in, method, a.ell, a.seed, a.batch, a.unscaled);

    cod::io::SketchSnapshot snap;
    if (res.cod_snapshot) {
        snap = *res.cod_snapshot;
    } else {
        snap.config = {a.ell, res.sketch.bx.rows(), res.sketch.by.rows()};
        snap.fill = a.ell;
        snap.columns_seen = static_cast<std::int64_t>(res.n);
        snap.frob_x_sq = res.frob_x_sq;
        snap.frob_y_sq = res.frob_y_sq;
        snap.bx = res.sketch.bx;
        snap.by = res.sketch.by;
    }
    cod::io::save_sketch(a.out, snap);

    std::cout << "sketch method=" << a.algo << " ell=" << a.ell << " n=" << res.n
              << " wall_time_s=" << fmt(res.wall_time_s) << " snapshot=" << a.out;

    if (a.audit) {
        cod::io::StreamReader reader(a.in);
        auto [x, y] = reader.read_all();
        if (x.rows() * y.rows() > cod::kDenseEntryCap && !a.force) {
            std::cout << "\n";
            std::cerr << "audit refused: dense oracle needs " << x.rows() * y.rows()
                      << " entries (cap " << cod::kDenseEntryCap << "); pass --force to override\n";
            return 1;
        }
        const double err = cod::amm_error(x, y, snap.bx, snap.by);
        double bound;
        if (method == cod::AmmMethod::Brute) {
            Eigen::BDCSVD<Eigen::MatrixXd> svd(x * y.transpose());
            bound = (a.ell < svd.singularValues().size()) ? svd.singularValues()(a.ell) : 0.0;
        } else {
            bound = reference_bound(method, a.ell, res.frob_x_sq, res.frob_y_sq);
        }
        std::cout << " spectral_error=" << fmt(err) << " bound=" << fmt(bound);
    }
    std::cout << "\n";
    return 0;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
    std::string in;
    GenArgs gen; // inline dataset spec when no --in
    std::vector<std::string> methods = {"cod", "fd-amm", "brute", "sampling", "projection",
                                        "hashing"};
    std::vector<Index> ells;
    int repeats = 50;
    std::uint64_t seed_base = 0;
    std::string out;
    bool audit = false;
    bool force = false;
};

struct BenchCell {
    cod::AmmMethod method;
    Index ell = 0;
    int rep = 0;
    std::uint64_t seed = 0;
    bool randomized = false;
};

struct CellResult {
    bool failed = false;
    std::string note;
    double spectral_error = std::numeric_limits<double>::quiet_NaN();
    double frobenius_error = std::numeric_limits<double>::quiet_NaN();
    double bound = std::numeric_limits<double>::quiet_NaN();
    double wall_time_s = 0.0;
};

int bench_workers() {
    if (const char* env = std::getenv("COD_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1)
            return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

int run_bench(const BenchArgs& a) {
    Eigen::MatrixXd x, y;
    if (!a.in.empty()) {
        cod::io::StreamReader reader(a.in);
        std::tie(x, y) = reader.read_all();
    } else {
        cod::LowRankModelSpec spec;
        spec.n = a.gen.n;
        spec.mx = a.gen.mx;
        spec.my = a.gen.my;
        spec.kx = a.gen.kx;
        spec.ky = a.gen.ky;
        if (a.gen.zeta_x > 0.0)
            spec.zeta_x = a.gen.zeta_x;
        if (a.gen.zeta_y > 0.0)
            spec.zeta_y = a.gen.zeta_y;
        spec.seed = a.gen.seed;
        spec.validate();
        std::tie(x, y) = cod::gen_low_rank(spec);
    }
    if (a.repeats < 1)
        throw cod::InvalidConfig(cod::InvalidConfig::Code::BadStats, "repeats must be >= 1");

    const bool dense_ok = x.rows() * y.rows() <= cod::kDenseEntryCap;
    if (a.audit && !dense_ok && !a.force) {
        std::cerr << "audit refused: dense oracle needs " << x.rows() * y.rows()
                  << " entries (cap " << cod::kDenseEntryCap << "); pass --force to override\n";
        return 2;
    }

    // plan in deterministic order: methods x ells x repeats
    std::vector<BenchCell> plan;
    for (const auto& name : a.methods) {
        const cod::AmmMethod method = parse_method(name);
        const bool randomized = cod::is_randomized(method);
        for (const Index ell : a.ells) {
            const int reps = randomized ? a.repeats : 1;
            for (int rep = 0; rep < reps; ++rep) {
                BenchCell cell;
                cell.method = method;
                cell.ell = ell;
                cell.rep = rep;
                cell.randomized = randomized;
                cell.seed = cod::rng::derive(a.seed_base, static_cast<std::uint64_t>(method),
                                             static_cast<std::uint64_t>(ell),
                                             static_cast<std::uint64_t>(rep));
                plan.push_back(cell);
            }
        }
    }

    const double frob_x_sq = x.squaredNorm(), frob_y_sq = y.squaredNorm();
    std::optional<Eigen::VectorXd> product_spectrum; // for brute's sigma_{ell+1}
    if (a.audit && dense_ok) {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(x * y.transpose());
        product_spectrum = svd.singularValues();
    }

    std::vector<CellResult> results(plan.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= plan.size())
                return;
            const BenchCell& cell = plan[i];
            CellResult& r = results[i];
            try {
                validate_ell_for(cell.method, cell.ell, x.rows(), y.rows());
                const auto t0 = Clock::now();
                const auto sk = cod::run_amm(cell.method, x, y, cell.ell, cell.seed);
                r.wall_time_s = seconds_since(t0);
                if (cell.method == cod::AmmMethod::Brute) {
                    if (product_spectrum)
                        r.bound = (cell.ell < product_spectrum->size())
                                      ? (*product_spectrum)(cell.ell)
                                      : 0.0;
                } else {
                    r.bound = reference_bound(cell.method, cell.ell, frob_x_sq, frob_y_sq);
                }
                if (a.audit) {
                    r.spectral_error = cod::amm_error(x, y, sk.bx, sk.by);
                    if (dense_ok)
                        r.frobenius_error = cod::amm_error_frobenius(x, y, sk.bx, sk.by);
                }
            } catch (const std::exception& e) {
                r.failed = true;
                r.note = e.what();
            }
        }
    };

    const int nworkers = std::min<int>(bench_workers(), static_cast<int>(plan.size()));
    std::vector<std::thread> pool;
    for (int w = 0; w < std::max(1, nworkers); ++w)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();

    std::ofstream csv(a.out, std::ios::binary); // binary keeps LF endings everywhere
    if (!csv)
        throw cod::io::IoError(cod::io::IoError::Code::OpenFailed, 0,
                               "cannot open " + a.out + " for writing");
    csv << "method,ell,seed,spectral_error,frobenius_error,thm_bound,wall_time_s,note\n";
    auto cellval = [](double v) { return std::isnan(v) ? std::string() : fmt(v); };

    for (std::size_t i = 0; i < plan.size(); ++i) {
        const BenchCell& cell = plan[i];
        const CellResult& r = results[i];
        csv << cod::to_string(cell.method) << "," << cell.ell << ","
            << (cell.randomized ? std::to_string(cell.seed) : std::string()) << ","
            << cellval(r.spectral_error) << "," << cellval(r.frobenius_error) << ","
            << cellval(r.bound) << "," << fmt(r.wall_time_s) << "," << r.note << "\n";

        // close of a randomized (method, ell) group: append mean/std rows
        const bool group_end =
            cell.randomized &&
            (i + 1 == plan.size() || plan[i + 1].method != cell.method ||
             plan[i + 1].ell != cell.ell);
        if (group_end) {
            const std::size_t begin = i + 1 - static_cast<std::size_t>(cell.rep + 1);
            auto stats = [&](auto&& get) {
                double mean = 0.0, m2 = 0.0;
                int count = 0;
                for (std::size_t j = begin; j <= i; ++j) {
                    if (results[j].failed)
                        continue;
                    const double v = get(results[j]);
                    if (std::isnan(v))
                        continue;
                    ++count;
                    const double d = v - mean;
                    mean += d / count;
                    m2 += d * (v - mean);
                }
                const double sd = count > 1 ? std::sqrt(m2 / (count - 1)) : 0.0;
                return std::pair<double, double>(count > 0 ? mean : std::nan(""), sd);
            };
            const auto spec = stats([](const CellResult& c) { return c.spectral_error; });
            const auto frob = stats([](const CellResult& c) { return c.frobenius_error; });
            const auto wall = stats([](const CellResult& c) { return c.wall_time_s; });
            const auto bnd = stats([](const CellResult& c) { return c.bound; });
            csv << cod::to_string(cell.method) << "," << cell.ell << ",mean,"
                << cellval(spec.first) << "," << cellval(frob.first) << ","
                << cellval(bnd.first) << "," << fmt(wall.first) << ",\n";
            csv << cod::to_string(cell.method) << "," << cell.ell << ",std,"
                << cellval(spec.second) << "," << cellval(frob.second) << ",,"
                << fmt(wall.second) << ",\n";
        }
    }
    csv.flush();
    if (!csv)
        throw cod::io::IoError(cod::io::IoError::Code::WriteFailed, 0, "write failed: " + a.out);
    std::cout << "bench wrote " << a.out << " (" << plan.size() << " cells, "
              << std::max(1, nworkers) << " workers)\n";
    return 0;
}

// ---------------------------------------------------------------- merge

struct MergeArgs {
    std::vector<std::string> snapshots;
    std::string out;
};

int run_merge(const MergeArgs& a) {
    auto acc = cod::io::restore(cod::io::load_sketch(a.snapshots.front()));
    for (std::size_t i = 1; i < a.snapshots.size(); ++i) {
        auto next = cod::io::restore(cod::io::load_sketch(a.snapshots[i]));
        acc = cod::CoOccurringSketch::merge(acc, next);
    }
    // a single snapshot is re-sketched through the same path for uniformity
    if (a.snapshots.size() == 1) {
        cod::CoOccurringSketch empty(acc.config());
        acc = cod::CoOccurringSketch::merge(acc, empty);
    }
    cod::io::save_sketch(a.out, cod::io::snapshot_of(acc));
    std::cout << "merge inputs=" << a.snapshots.size() << " columns_seen=" << acc.columns_seen()
              << " fill=" << acc.fill() << " out=" << a.out << "\n";
    return 0;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
    int trials = 20;
    std::string check;
    std::uint64_t seed_base = 2024;
    std::string inject_fault;
    std::string json_out;
};

int run_verify(const VerifyArgs& a) {
    cod::verify::Options opt;
    opt.trials = a.trials;
    opt.only = a.check;
    opt.seed_base = a.seed_base;
    if (!a.inject_fault.empty()) {
        if (a.inject_fault != "delta")
            throw cod::InvalidConfig(cod::InvalidConfig::Code::BadStats,
                                     "unknown fault '" + a.inject_fault + "' (supported: delta)");
        opt.inject_delta_fault = true;
    }

    const auto results = cod::verify::run_battery(opt);
    if (results.empty())
        throw cod::InvalidConfig(cod::InvalidConfig::Code::BadStats,
                                 "unknown check '" + a.check + "'");
    for (const auto& r : results)
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";

    const bool ok = cod::verify::all_passed(results);
    if (!a.json_out.empty()) {
        nlohmann::json doc;
        doc["pass"] = ok;
        doc["trials"] = a.trials;
        doc["seed_base"] = a.seed_base;
        doc["checks"] = nlohmann::json::array();
        for (const auto& r : results)
            doc["checks"].push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        std::ofstream out(a.json_out, std::ios::binary);
        out << doc.dump(2) << "\n";
        if (!out)
            throw cod::io::IoError(cod::io::IoError::Code::WriteFailed, 0,
                                   "write failed: " + a.json_out);
    }
    std::cout << (ok ? "verify: all checks passed" : "verify: FAILURES detected") << "\n";
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cod -- streaming approximate matrix multiplication toolkit"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* cmd_gen = app.add_subcommand("gen", "Generate a synthetic low-rank paired stream");
    cmd_gen->add_option("--n", gen.n, "number of columns")->required();
    cmd_gen->add_option("--mx", gen.mx, "row dimension of X")->required();
    cmd_gen->add_option("--my", gen.my, "row dimension of Y")->required();
    cmd_gen->add_option("--kx", gen.kx, "target rank of X")->required();
    cmd_gen->add_option("--ky", gen.ky, "target rank of Y")->required();
    cmd_gen->add_option("--zeta-x", gen.zeta_x, "noise divisor for X (0 = noise-free)");
    cmd_gen->add_option("--zeta-y", gen.zeta_y, "noise divisor for Y (0 = noise-free)");
    cmd_gen->add_option("--seed", gen.seed, "generator seed");
    cmd_gen->add_option("--out", gen.out, "output stream path")->required();
    cmd_gen->set_config("--config");

    SketchArgs sk;
    auto* cmd_sketch = app.add_subcommand("sketch", "Sketch a stream file in one pass");
    cmd_sketch->add_option("--in", sk.in, "input stream path")->required();
    cmd_sketch
        ->add_option("--algo", sk.algo, "cod | fd-amm | brute | sampling | projection | hashing")
        ->required();
    cmd_sketch->add_option("--ell", sk.ell, "sketch length")->required();
    cmd_sketch->add_option("--seed", sk.seed, "seed for randomized methods");
    cmd_sketch->add_option("--batch", sk.batch, "read batch size")->check(CLI::PositiveNumber);
    cmd_sketch->add_option("--out", sk.out, "snapshot output path")->required();
    cmd_sketch->add_flag("--audit", sk.audit, "compare against the dense oracle");
    cmd_sketch->add_flag("--force", sk.force, "audit even above the dense-entry cap");
    cmd_sketch->add_flag("--unscaled", sk.unscaled,
                         "sampling only: skip the 1/sqrt(ell p_i) column rescaling");
    cmd_sketch->set_config("--config");

    BenchArgs bench;
    auto* cmd_bench = app.add_subcommand("bench", "Sweep methods x sketch lengths, write CSV");
    cmd_bench->add_option("--in", bench.in, "input stream path (instead of generator flags)");
    cmd_bench->add_option("--n", bench.gen.n, "generator: columns");
    cmd_bench->add_option("--mx", bench.gen.mx, "generator: rows of X");
    cmd_bench->add_option("--my", bench.gen.my, "generator: rows of Y");
    cmd_bench->add_option("--kx", bench.gen.kx, "generator: rank of X");
    cmd_bench->add_option("--ky", bench.gen.ky, "generator: rank of Y");
    cmd_bench->add_option("--zeta-x", bench.gen.zeta_x, "generator: noise divisor for X");
    cmd_bench->add_option("--zeta-y", bench.gen.zeta_y, "generator: noise divisor for Y");
    cmd_bench->add_option("--gen-seed", bench.gen.seed, "generator seed");
    cmd_bench->add_option("--methods", bench.methods, "comma-separated method list")
        ->delimiter(',');
    cmd_bench->add_option("--ells", bench.ells, "comma-separated sketch lengths")
        ->delimiter(',')
        ->required();
    cmd_bench->add_option("--repeats", bench.repeats, "repeats for randomized methods");
    cmd_bench->add_option("--seed-base", bench.seed_base, "base seed for cell derivation");
    cmd_bench->add_option("--out", bench.out, "output CSV path")->required();
    cmd_bench->add_flag("--audit", bench.audit, "compute error columns via the dense oracle");
    cmd_bench->add_flag("--force", bench.force, "audit even above the dense-entry cap");
    cmd_bench->set_config("--config");

    MergeArgs merge;
    auto* cmd_merge = app.add_subcommand("merge", "Merge sketch snapshots");
    cmd_merge->add_option("snapshots", merge.snapshots, "snapshot files")
        ->required()
        ->expected(1, -1);
    cmd_merge->add_option("--out", merge.out, "merged snapshot path")->required();
    cmd_merge->set_config("--config");

    VerifyArgs verify;
    auto* cmd_verify = app.add_subcommand("verify", "Run the self-check battery");
    cmd_verify->add_option("--trials", verify.trials, "streams per check")
        ->check(CLI::PositiveNumber);
    cmd_verify->add_option("--check", verify.check,
                           "single check: thm2 | delta-audit | fd-bound | fd-reduction | merge "
                           "| unbiasedness | thm3");
    cmd_verify->add_option("--seed-base", verify.seed_base, "base seed");
    cmd_verify->add_option("--inject-fault", verify.inject_fault,
                           "test hook: corrupt internal state (supported: delta)");
    cmd_verify->add_option("--json", verify.json_out, "also write a JSON report");
    cmd_verify->set_config("--config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_gen->parsed())
            return run_gen(gen);
        if (cmd_sketch->parsed())
            return run_sketch(sk);
        if (cmd_bench->parsed())
            return run_bench(bench);
        if (cmd_merge->parsed())
            return run_merge(merge);
        if (cmd_verify->parsed())
            return run_verify(verify);
    } catch (const cod::InvalidConfig& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const cod::DimensionMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
