#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "bench_stats.hpp"
#include "serinv/serinv.hpp"

#ifdef SERINV_HAVE_MPI
#include <mpi.h>
#endif

namespace {

using namespace serinv;

constexpr double kVerifyTolerance = 1e-9;

enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kNotVerified = 0 };

struct GenerateArgs {
    std::uint64_t seed = 1;
    std::size_t n = 0, b = 0, a = 0;
    double density = 1.0;
    std::string out;
};

struct SelinvArgs {
    std::string in;
    int ranks = 1;
    double ratio = kDefaultRatio;
    bool nested = false;
    std::string mode = "seq";
    std::string out;
    bool verify = false;
    bool cross_check = false;
    bool ranks_given = false;
};

struct BenchArgs {
    std::string in;
    int ranks = 1;
    double ratio = kDefaultRatio;
    bool nested = false;
    int repeats = 10;
    std::string out_json;
    std::string out_csv;
};

struct ModelArgs {
    std::size_t n = 0, b = 0, a = 0;
    int ranks = 1;
    double ratio = kTheoreticalRatio;
    bool json = false;
};

std::string transport_name() {
    const char* v = std::getenv("SERINV_TRANSPORT");
    return v && *v ? std::string(v) : std::string("inprocess");
}

std::string sci(double x) {
    std::ostringstream s;
    s << std::scientific << std::setprecision(3) << x;
    return s.str();
}

int run_generate(const GenerateArgs& g) {
    BtaMatrix m;
    try {
        m = generate_spd_bta(g.seed, g.n, g.b, g.a, g.density);
    } catch (const Error& e) {
        if (e.code() == Errc::InvalidDensity) {
            std::cerr << "usage error: " << e.what() << "\n";
            return kUsage;
        }
        throw;
    }
    write_bta(g.out, m);
    std::cout << "wrote " << g.out << ": n=" << m.n << " b=" << m.b << " a=" << m.a
              << " N=" << m.dimension() << " bytes=" << bta_file_bytes(m.n, m.b, m.a) << "\n";
    return kOk;
}

// Dense-oracle check of `x`, or nullopt when the matrix is too large.
std::optional<double> oracle_error(const BtaMatrix& a, const SelectedInverse& x) {
    if (a.dimension() > kDenseOracleLimit) {
        return std::nullopt;
    }
    return max_relative_error(x, dense_selected_inverse(a));
}

int run_selinv(const SelinvArgs& s) {
    const BtaMatrix a = read_bta(s.in);
    const auto t0 = std::chrono::steady_clock::now();
    SelectedInverse x;
    if (s.mode == "seq") {
        x = selinv(a);
    } else {
        auto result = pselinv(a, s.ranks, s.ratio, s.nested);
        x = std::move(result.inverse);
        std::cout << "plan:";
        for (const auto& r : result.plan.ranges) std::cout << " [" << r.begin << "," << r.end << ")";
        std::cout << " reduced_blocks=" << result.reduced_blocks << "\n";
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "selinv mode=" << s.mode << " ranks=" << (s.mode == "seq" ? 1 : s.ranks)
              << " n=" << a.n << " b=" << a.b << " a=" << a.a << " seconds=" << sci(seconds)
              << "\n";

    if (!s.out.empty()) {
        x.symmetric = false;
        write_bta(s.out, x);
        std::cout << "wrote " << s.out << "\n";
    }

    int status = kOk;
    if (s.cross_check) {
        SelectedInverse other = s.mode == "seq" ? pselinv(a, s.ranks, s.ratio, s.nested).inverse
                                                : selinv(a);
        const double diff = max_relative_error(x, other);
        std::cout << "cross-check seq/par: max_rel_diff=" << sci(diff)
                  << (diff <= kVerifyTolerance ? " pass" : " FAIL") << "\n";
        if (diff > kVerifyTolerance) status = kFailure;
    }
    if (s.verify) {
        auto err = oracle_error(a, x);
        if (!err) {
            std::cout << "verify: unverified (N=" << a.dimension() << " exceeds dense-oracle limit "
                      << kDenseOracleLimit << ")\n";
            return status == kOk ? kNotVerified : status;
        }
        const bool ok = *err <= kVerifyTolerance;
        std::cout << "verify: " << (ok ? "pass" : "FAIL") << " max_rel_error=" << sci(*err)
                  << " tolerance=" << sci(kVerifyTolerance) << "\n";
        if (!ok) status = kFailure;
    }
    return status;
}

#ifdef SERINV_HAVE_MPI
// Every process reads the input and owns one partition; rank 0 reports.
int run_selinv_cluster(const SelinvArgs& s, Communicator& comm) {
    const BtaMatrix a = read_bta(s.in);
    const bool root = comm.rank() == 0;
    if (s.mode != "par") {
        if (!root) return kOk;
        SelinvArgs local = s;
        return run_selinv(local);
    }
    if (root && s.ranks_given && s.ranks != comm.size()) {
        std::cout << "note: --ranks " << s.ranks << " ignored, using the " << comm.size()
                  << " launched processes\n";
    }
    const auto plan = plan_partitions(a.n, comm.size(), s.ratio);
    auto outcome = pselinv_rank(comm, a, plan, s.nested ? ReducedSolve::Nested : ReducedSolve::Sequential);
    if (!root) return kOk;
    SelectedInverse x = std::move(*outcome.inverse);
    std::cout << "selinv mode=par transport=cluster ranks=" << comm.size() << " n=" << a.n
              << " b=" << a.b << " a=" << a.a << " reduced_blocks=" << outcome.reduced_blocks << "\n";
    if (!s.out.empty()) {
        x.symmetric = false;
        write_bta(s.out, x);
        std::cout << "wrote " << s.out << "\n";
    }
    if (!s.verify) return kOk;
    auto err = oracle_error(a, x);
    if (!err) {
        std::cout << "verify: unverified (N=" << a.dimension() << " exceeds dense-oracle limit "
                  << kDenseOracleLimit << ")\n";
        return kNotVerified;
    }
    const bool ok = *err <= kVerifyTolerance;
    std::cout << "verify: " << (ok ? "pass" : "FAIL") << " max_rel_error=" << sci(*err) << "\n";
    return ok ? kOk : kFailure;
}
#endif

const char* phase_name(int phase) {
    switch (phase) {
        case 0: return "ppobtaf";
        case 1: return "pobtarssi";
        case 2: return "ppobtasi";
        default: return "total";
    }
}

double phase_seconds(const RankReport& r, int phase) {
    switch (phase) {
        case 0: return r.seconds.forward;
        case 1: return r.seconds.reduced;
        case 2: return r.seconds.backward;
        default: return r.seconds.total;
    }
}

const KernelLedger* phase_ledger(const RankReport& r, int phase) {
    switch (phase) {
        case 0: return &r.forward;
        case 1: return &r.reduced;
        case 2: return &r.backward;
        default: return nullptr;
    }
}

bool ledgers_match(const KernelLedger& got, const KernelLedger& want) {
    for (auto k : kAllKernels) {
        for (auto s : kAllShapes) {
            const double scale = std::max(1.0, std::abs(want.flops(k, s)));
            if (got.calls(k, s) != want.calls(k, s) ||
                std::abs(got.flops(k, s) - want.flops(k, s)) > 1e-12 * scale) {
                return false;
            }
        }
    }
    return true;
}

void write_csv(const std::string& path, const nlohmann::json& samples) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::IoError, "cannot open " + path);
    out << "repeat,phase,rank,seconds,kernel,shape_class,calls,flops,kernel_seconds\n";
    out << std::setprecision(17);
    for (const auto& s : samples) {
        const std::string head = std::to_string(s["repeat"].get<int>()) + "," +
                                 s["phase"].get<std::string>() + "," +
                                 std::to_string(s["rank"].get<int>()) + ",";
        const auto& rows = s["kernel_ledger"];
        if (rows.empty()) {
            out << head << s["seconds"].get<double>() << ",,,,,\n";
        }
        for (const auto& r : rows) {
            out << head << s["seconds"].get<double>() << "," << r["kernel"].get<std::string>() << ","
                << r["shape_class"].get<std::string>() << "," << r["calls"].get<std::uint64_t>()
                << "," << r["flops"].get<double>() << "," << r["seconds"].get<double>() << "\n";
        }
    }
}

int run_bench(const BenchArgs& args) {
    const BtaMatrix a = read_bta(args.in);
    auto samples = nlohmann::json::array();
    std::map<std::pair<int, int>, std::vector<double>> times;  // (phase, rank)
    std::vector<double> wall;
    bool model_ok = true;
    PartitionPlan plan;
    for (int rep = 0; rep < args.repeats; ++rep) {
        const auto t0 = std::chrono::steady_clock::now();
        auto result = pselinv(a, args.ranks, args.ratio, args.nested);
        wall.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        plan = result.plan;
        for (const auto& r : result.ranks) {
            for (int phase = 0; phase < 4; ++phase) {
                const KernelLedger* ledger = phase_ledger(r, phase);
                samples.push_back({{"repeat", rep},
                                   {"phase", phase_name(phase)},
                                   {"rank", r.rank},
                                   {"seconds", phase_seconds(r, phase)},
                                   {"kernel_ledger", ledger ? ledger->to_json() : nlohmann::json::array()}});
                times[{phase, r.rank}].push_back(phase_seconds(r, phase));
                if (ledger && !args.nested) {
                    const Phase p = phase == 0 ? Phase::Forward : phase == 1 ? Phase::Reduced : Phase::Backward;
                    model_ok = model_ok && ledgers_match(*ledger, predicted_rank_counts(p, plan, r.rank, a.b, a.a));
                }
            }
        }
    }

    auto summary = nlohmann::json::array();
    for (const auto& [key, values] : times) {
        auto m = tools::summarize(values);
        summary.push_back({{"phase", phase_name(key.first)},
                           {"rank", key.second},
                           {"samples", m.samples},
                           {"median", m.median},
                           {"ci95_low", m.low},
                           {"ci95_high", m.high},
                           {"ci_coverage", m.coverage}});
    }
    auto w = tools::summarize(wall);

    nlohmann::json doc;
    doc["schema"] = "serinv.bench/1";
    doc["params"] = {{"input", args.in},   {"n", a.n},           {"b", a.b},
                     {"a", a.a},           {"ranks", args.ranks}, {"ratio", args.ratio},
                     {"nested", args.nested}, {"repeats", args.repeats},
                     {"backend", kernel_backend()}, {"transport", transport_name()}};
    doc["samples"] = samples;
    doc["summary"] = summary;
    doc["wall"] = {{"median", w.median}, {"ci95_low", w.low}, {"ci95_high", w.high}};
    if (!args.nested) doc["ledger_matches_model"] = model_ok;

    std::cout << std::left << std::setw(10) << "phase" << std::setw(6) << "rank" << std::setw(12)
              << "median_s" << "ci95\n";
    for (const auto& s : summary) {
        std::cout << std::setw(10) << s["phase"].get<std::string>() << std::setw(6)
                  << s["rank"].get<int>() << std::setw(12) << sci(s["median"].get<double>()) << "["
                  << sci(s["ci95_low"].get<double>()) << ", " << sci(s["ci95_high"].get<double>())
                  << "]\n";
    }
    if (!args.nested) std::cout << "ledger matches model: " << (model_ok ? "yes" : "no") << "\n";

    if (!args.out_json.empty()) {
        std::ofstream out(args.out_json);
        if (!out) throw Error(Errc::IoError, "cannot open " + args.out_json);
        out << doc.dump(2) << "\n";
    }
    if (!args.out_csv.empty()) write_csv(args.out_csv, samples);
    return kOk;
}

int run_model(const ModelArgs& m) {
    auto report = model_report(m.n, m.b, m.a, m.ranks, m.ratio);
    if (m.json) {
        std::cout << report.dump(2) << "\n";
        return kOk;
    }
    std::cout << "n=" << m.n << " b=" << m.b << " a=" << m.a << " P=" << m.ranks
              << " ratio=" << m.ratio << "\n\nflops\n";
    for (const auto& r : report["routines"]) {
        std::cout << "  " << std::left << std::setw(10) << r["routine"].get<std::string>();
        if (r.contains("error")) {
            std::cout << "n/a (" << r["error"].get<std::string>() << ")\n";
        } else {
            std::cout << sci(r["flops"].get<double>()) << "  reference " << sci(r["flops_reference"].get<double>())
                      << "\n";
        }
    }
    if (report.contains("load_balance")) {
        const auto& lb = report["load_balance"];
        std::cout << "\nload balance  ppobtaf " << std::fixed << std::setprecision(3)
                  << lb["ppobtaf"].get<double>() << "  ppobtasi " << lb["ppobtasi"].get<double>()
                  << "  weight " << lb["ppobtaf_weight"].get<double>() << "  r_LB "
                  << lb["r_lb"].get<double>() << "\n";
    }
    std::cout << "\nefficiency over P (n=" << m.n << ")\n";
    for (const auto& row : report["efficiency_over_P"]) {
        std::cout << "  P=" << std::setw(4) << row["P"].get<int>() << std::fixed << std::setprecision(4)
                  << row["efficiency"].get<double>() << "\n";
    }
    std::cout << "\nefficiency over n (P=" << m.ranks << ")\n";
    for (const auto& row : report["efficiency_over_n"]) {
        std::cout << "  n=" << std::setw(6) << row["n"].get<std::size_t>() << std::fixed
                  << std::setprecision(4) << row["efficiency"].get<double>() << "\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Selected inversion of block-tridiagonal-arrowhead matrices"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Write a random SPD BTA matrix");
    g->add_option("--seed", gen.seed)->default_val(1);
    g->add_option("--n", gen.n, "diagonal blocks")->required()->check(CLI::PositiveNumber);
    g->add_option("--b", gen.b, "diagonal block size")->required()->check(CLI::PositiveNumber);
    g->add_option("--a", gen.a, "arrow tip size")->default_val(0);
    g->add_option("--density", gen.density, "off-diagonal fill in (0, 1]")->default_val(1.0);
    g->add_option("--out", gen.out)->required();

    SelinvArgs sel;
    auto* s = app.add_subcommand("selinv", "Selected inverse of a BTA file");
    s->add_option("--in", sel.in)->required()->check(CLI::ExistingFile);
    s->add_option("--ranks", sel.ranks)->default_val(1)->check(CLI::PositiveNumber);
    s->add_option("--ratio", sel.ratio, "top/middle partition size ratio")->default_val(kDefaultRatio);
    s->add_flag("--nested", sel.nested, "solve the reduced system in parallel");
    s->add_option("--mode", sel.mode)->default_val("seq")->check(CLI::IsMember({"seq", "par"}));
    s->add_option("--out", sel.out);
    s->add_flag("--verify", sel.verify, "compare with the dense oracle");
    s->add_flag("--cross-check", sel.cross_check, "also run the other mode and compare");

    BenchArgs bench;
    auto* bn = app.add_subcommand("bench", "Time the parallel pipeline");
    bn->add_option("--in", bench.in)->required()->check(CLI::ExistingFile);
    bn->add_option("--ranks", bench.ranks)->default_val(1)->check(CLI::PositiveNumber);
    bn->add_option("--ratio", bench.ratio)->default_val(kDefaultRatio);
    bn->add_flag("--nested", bench.nested);
    bn->add_option("--repeats", bench.repeats)->default_val(10)->check(CLI::PositiveNumber);
    bn->add_option("--out-json", bench.out_json);
    bn->add_option("--out-csv", bench.out_csv);

    ModelArgs model;
    auto* md = app.add_subcommand("model", "Flop counts, load balance and efficiency model");
    md->add_option("--n", model.n)->required()->check(CLI::PositiveNumber);
    md->add_option("--b", model.b)->required()->check(CLI::PositiveNumber);
    md->add_option("--a", model.a)->default_val(0);
    md->add_option("--P", model.ranks)->default_val(1)->check(CLI::PositiveNumber);
    md->add_option("--ratio", model.ratio)->default_val(kTheoreticalRatio);
    md->add_flag("--json", model.json);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    const std::string transport = transport_name();
    if (transport == "cluster") {
#ifdef SERINV_HAVE_MPI
        if (!*s) {
            std::cerr << "error: SERINV_TRANSPORT=cluster only applies to selinv\n";
            return kUsage;
        }
        MpiSession session(&argc, &argv);
        auto world = session.world();
        sel.ranks_given = s->count("--ranks") > 0;
        try {
            return run_selinv_cluster(sel, *world);
        } catch (const std::exception& e) {
            std::cerr << "error (rank " << world->rank() << "): " << e.what() << "\n";
            MPI_Abort(MPI_COMM_WORLD, kFailure);
            return kFailure;
        }
#else
        std::cerr << "error: SERINV_TRANSPORT=cluster needs a build with -DSERINV_WITH_MPI=ON\n";
        return kUsage;
#endif
    }
    if (transport != "inprocess") {
        std::cerr << "error: unknown SERINV_TRANSPORT=" << transport
                  << " (expected inprocess or cluster)\n";
        return kUsage;
    }

    try {
        if (*g) return run_generate(gen);
        if (*s) return run_selinv(sel);
        if (*bn) return run_bench(bench);
        if (*md) return run_model(model);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kOk;
}
