// Command-line front end: validate configs, tabulate equilibrium regimes,
// design disclosure mechanisms, and compare design methods.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "infodesign/equilibrium.hpp"
#include "infodesign/io.hpp"
#include "infodesign/mechanism.hpp"
#include "infodesign/network.hpp"
#include "infodesign/optimizer.hpp"

using namespace infodesign;

namespace {

struct Options {
    std::string input;
    std::string out = ".";
    double eps = 1.0 / 256;
    unsigned long seed = 0;
    std::string method = "auto";
};

struct Analysis {
    ModelConfig cfg;
    DistanceTable dist;
    BalanceReport a1;
    DepletionReport a2;
    InitialBalanceReport a3;
    MarketClass mc;
    std::optional<RegimeTable> table;  // simple if A1+A2, else general if A3
    std::string table_kind;           // "simple" / "general" / ""
};

Analysis analyze(const Options& opt) {
    Analysis a{load_model_config(opt.input), {}, {}, {}, {}, {}, std::nullopt, ""};
    a.dist = shortest_distances(a.cfg.net);
    a.a1 = check_homogeneous_balance(a.cfg.net, a.cfg.prior);
    a.a2 = check_no_depletion(a.cfg.net, a.cfg.prior, a.dist);
    a.a3 = check_initial_balance(a.cfg.net, a.cfg.prior);
    a.mc = classify_market_sizes(a.cfg.net, a.dist);
    if (a.a1.ok && a.a2.ok) {
        a.table = regimes_simple(a.cfg.net, a.dist, a.cfg.prior);
        a.table_kind = "simple";
    } else if (a.a3.ok) {
        a.table = regimes_general(a.cfg.net, a.dist, a.cfg.prior);
        a.table_kind = "general";
    }
    return a;
}

std::string mark(bool ok) { return ok ? "ok" : "FAIL"; }

void write_revenue_curve(const std::string& path, const PiecewiseLinear& R,
                         const PiecewiseLinear& nu, const Prior& F) {
    std::vector<double> grid = R.breakpoints();
    grid.insert(grid.end(), nu.breakpoints().begin(), nu.breakpoints().end());
    for (int i = 0; i <= 256; ++i) grid.push_back(F.lo() + F.width() * i / 256);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    std::ostringstream os;
    os << "s0,R,nu\n";
    for (double z : grid)
        os << fmt12(z) << "," << fmt12(R.eval(z)) << "," << fmt12(nu.eval(z)) << "\n";
    write_file(path, os.str());
}

int cmd_validate(const Options& opt) {
    auto a = analyze(opt);
    std::cout << "nodes: " << a.cfg.net.size() << ", commission r = " << fmt12(a.cfg.net.commission)
              << ", prior " << to_string(a.cfg.prior.kind()) << " on ["
              << fmt12(a.cfg.prior.lo()) << ", " << fmt12(a.cfg.prior.hi()) << "]\n";
    std::cout << "A1 homogeneous balance: " << mark(a.a1.ok) << "\n";
    std::cout << "A2 no depletion: " << mark(a.a2.ok) << " (upper bound "
              << fmt12(a.a2.upper_bound) << ", lower bound " << fmt12(a.a2.lower_bound)
              << ", binding " << a.a2.binding << ")\n";
    std::cout << "A3 initial balance: " << mark(a.a3.ok);
    if (!a.a3.ok)
        std::cout << " (pair " << a.a3.violating.first << "," << a.a3.violating.second << ")";
    std::cout << "\n";
    if (a.table) {
        auto reg = check_regularity(*a.table);
        std::cout << "A4 regularity: " << mark(reg.ok) << "\n";
        std::cout << "regimes: K = " << a.table->K << ", K~ = " << a.table->K_tilde << " ("
                  << a.table_kind << ")\n";
    } else {
        std::cout << "A4 regularity: skipped (no balanced regime table)\n";
    }
    std::cout << "market sizes: " << to_string(a.mc.pattern);
    if (a.mc.pattern == SizePattern::Increasing || a.mc.pattern == SizePattern::Decreasing)
        std::cout << " on [" << fmt12(a.mc.d_lo) << ", " << fmt12(a.mc.d_hi) << "]";
    std::cout << "\n";
    try {
        double rb = r_bar(a.cfg.net, a.dist);
        std::cout << "r_bar = " << fmt12(rb) << "\n";
        if (a.cfg.net.commission > rb)
            std::cout << "note: r > r_bar, all sizes classify similar and full revelation "
                         "is optimal\n";
    } catch (const NoPairs&) {
        std::cout << "r_bar: undefined (single distance group)\n";
    }
    return 0;
}

int cmd_regimes(const Options& opt) {
    auto a = analyze(opt);
    if (!a.table) throw AssumptionViolated("no regime table: initial balance fails");
    write_file((std::filesystem::path(opt.out) / "regimes.csv").string(),
               regimes_to_csv(*a.table));
    write_file((std::filesystem::path(opt.out) / "regimes.json").string(),
               table_to_json(*a.table).dump(2) + "\n");
    std::cout << "regime table (" << a.table_kind << "): K = " << a.table->K
              << ", K~ = " << a.table->K_tilde << ", anchor revenue R(E) = "
              << fmt12(a.table->anchor_revenue) << "\n";
    for (const auto& reg : a.table->regimes)
        std::cout << "  k = " << reg.k << ": [" << fmt12(reg.lo) << ", " << fmt12(reg.hi)
                  << "), slope " << fmt12(reg.slope) << "\n";
    std::cout << "wrote regimes.csv, regimes.json\n";
    return 0;
}

struct DesignOutcome {
    std::string method;
    double value = 0;
    json mechanism;
    json certificate;
    PiecewiseLinear nu;
    bool double_interval = false;
};

DesignOutcome run_design(const Analysis& a, const Options& opt) {
    if (!a.table) throw AssumptionViolated("design needs at least initial balance");
    const auto& F = a.cfg.prior;
    auto R = revenue_function(*a.table);

    bool alg1_applicable = a.table_kind == "simple" && a.mc.pattern != SizePattern::Mixed;
    std::string method = opt.method;
    if (method == "auto") method = alg1_applicable ? "alg1" : "prop8";

    DesignOutcome out;
    out.nu = R;
    out.method = method;
    if (method == "alg1") {
        if (!alg1_applicable)
            throw PatternMismatch("the threshold algorithm requires A1+A2 and a non-mixed classification");
        auto res = algorithm1_thresholds(*a.table, R, F, &a.mc);
        out.value = expected_revenue(R, res.mechanism, F);
        out.mechanism = mechanism_to_json(res.mechanism);
        auto cert = duality_certificate(R, res.mechanism, F);
        out.certificate = certificate_to_json(cert);
        out.nu = cert.nu;
        std::cout << "threshold search: z_lo = " << fmt12(res.z_lo) << ", z_hi = " << fmt12(res.z_hi)
                  << ", z* = " << fmt12(res.z_star)
                  << (res.full_revelation ? " (full revelation)" : "") << "\n";
    } else if (method == "prop8") {
        auto alloc = solve_prop8(*a.table, R, F, opt.eps);
        auto rec = recover_structure(alloc, F, &R);
        out.value = alloc.objective;
        for (const auto& iv : rec.structure.intervals) out.double_interval |= iv.double_interval;
        if (out.double_interval) {
            out.mechanism = structure_to_json(rec.structure);
            auto cert = duality_certificate(R, rec.structure, F);
            out.certificate = certificate_to_json(cert);
            out.nu = cert.nu;
        } else {
            MonotonePartitional mech;
            double cur = F.lo();
            for (const auto& iv : rec.structure.intervals) {
                if (iv.a > cur) mech.cells.push_back({cur, iv.a, false, 0});
                mech.cells.push_back({iv.a, iv.b, true, iv.x});
                cur = iv.b;
            }
            if (cur < F.hi()) mech.cells.push_back({cur, F.hi(), false, 0});
            mech = mech.canonicalized(F);
            out.mechanism = mechanism_to_json(mech);
            auto cert = duality_certificate(R, mech, F);
            out.certificate = certificate_to_json(cert);
            out.nu = cert.nu;
        }
        std::cout << "prop8 objective = " << fmt12(out.value)
                  << (out.double_interval ? " (double-interval structure detected)" : "") << "\n";
    } else if (method == "dp") {
        auto dp = dp_partitional(RevenueOracle::from_pwl(R, F), F, opt.eps);
        out.value = dp.value;
        out.mechanism = mechanism_to_json(dp.mechanism);
        auto cert = duality_certificate(R, dp.mechanism, F);
        out.certificate = certificate_to_json(cert);
        out.nu = cert.nu;
        std::cout << "dp value = " << fmt12(dp.value) << " at eps = " << fmt12(opt.eps) << "\n";
    } else {
        throw ConfigError("unknown method: " + method);
    }
    return out;
}

int cmd_design(const Options& opt) {
    auto a = analyze(opt);
    if (!a.table) throw AssumptionViolated("design needs at least initial balance");
    auto R = revenue_function(*a.table);
    auto out = run_design(a, opt);
    std::filesystem::path dir(opt.out);
    write_file((dir / "mechanism.json").string(), out.mechanism.dump(2) + "\n");
    write_file((dir / "certificate.json").string(), out.certificate.dump(2) + "\n");
    write_revenue_curve((dir / "revenue_curve.csv").string(), R, out.nu, a.cfg.prior);
    auto cond = check_conditions(*a.table, R, a.cfg.prior);
    json report{{"method", out.method},
                {"value", out.value},
                {"double_interval_detected", out.double_interval},
                {"condition_flags",
                 {{"C1", cond.C1}, {"C2", cond.C2}, {"C3", cond.C3}, {"C4", cond.C4}}},
                {"mechanism", out.mechanism},
                {"certificate", out.certificate}};
    write_file((dir / "report.json").string(), report.dump(2) + "\n");
    std::cout << "design value = " << fmt12(out.value) << " (method " << out.method << ")\n";
    std::cout << "certificate ok = " << (out.certificate.value("ok", false) ? "true" : "false")
              << "\n";
    std::cout << "wrote mechanism.json, certificate.json, revenue_curve.csv, report.json\n";
    return 0;
}

int cmd_prop8(const Options& opt) {
    auto a = analyze(opt);
    if (!a.table) throw AssumptionViolated("prop8 needs at least initial balance");
    auto R = revenue_function(*a.table);
    auto alloc = solve_prop8(*a.table, R, a.cfg.prior, opt.eps);
    std::cout << "prop8 objective = " << fmt12(alloc.objective) << "\n";
    std::cout << "k,p,y,atom\n";
    for (const auto& e : alloc.entries)
        std::cout << e.k << "," << fmt12(e.p) << "," << fmt12(e.y) << ","
                  << (e.p > 1e-9 ? fmt12(e.y / e.p) : "-") << "\n";
    auto rec = recover_structure(alloc, a.cfg.prior, &R);
    std::filesystem::path dir(opt.out);
    write_file((dir / "structure.json").string(), structure_to_json(rec.structure).dump(2) + "\n");
    std::cout << "recovered " << rec.structure.intervals.size()
              << " pooled interval(s), max residual " << fmt12(rec.max_residual) << "\n";
    return 0;
}

int cmd_dp(const Options& opt) {
    auto a = analyze(opt);
    if (!a.table) throw AssumptionViolated("dp needs at least initial balance");
    auto R = revenue_function(*a.table);
    auto dp = dp_partitional(RevenueOracle::from_pwl(R, a.cfg.prior), a.cfg.prior, opt.eps);
    std::filesystem::path dir(opt.out);
    write_file((dir / "mechanism.json").string(), mechanism_to_json(dp.mechanism).dump(2) + "\n");
    std::ostringstream os;
    os << "l,cutoff,V\n";
    for (std::size_t l = 0; l < dp.cutoffs.size(); ++l)
        os << l << "," << fmt12(dp.cutoffs[l]) << "," << fmt12(dp.bellman[l]) << "\n";
    write_file((dir / "dp_table.csv").string(), os.str());
    std::cout << "dp value = " << fmt12(dp.value) << " over " << dp.cutoffs.size()
              << " cutoffs\n";
    std::cout << "wrote mechanism.json, dp_table.csv\n";
    return 0;
}

int cmd_compare(const Options& opt) {
    auto a = analyze(opt);
    if (!a.table) throw AssumptionViolated("compare needs at least initial balance");
    const auto& F = a.cfg.prior;
    auto R = revenue_function(*a.table);
    double no_info = expected_revenue(R, MonotonePartitional::no_information(F), F);

    struct Row {
        std::string name;
        double revenue;
        double ms;
    };
    std::vector<Row> rows;
    auto timed = [&](const std::string& name, auto&& fn) {
        auto t0 = std::chrono::steady_clock::now();
        double v = fn();
        auto t1 = std::chrono::steady_clock::now();
        rows.push_back({name, v, std::chrono::duration<double, std::milli>(t1 - t0).count()});
    };
    timed("no-info", [&] { return no_info; });
    timed("full-info",
          [&] { return expected_revenue(R, MonotonePartitional::full_revelation(F), F); });
    bool alg1_ok = a.table_kind == "simple" && a.mc.pattern != SizePattern::Mixed;
    if (alg1_ok)
        timed("alg1", [&] {
            auto res = algorithm1_thresholds(*a.table, R, F, &a.mc);
            return expected_revenue(R, res.mechanism, F);
        });
    timed("dp", [&] { return dp_partitional(RevenueOracle::from_pwl(R, F), F, opt.eps).value; });
    timed("prop8", [&] { return solve_prop8(*a.table, R, F, opt.eps).objective; });

    double dp_v = 0, p8_v = 0;
    std::ostringstream os;
    // runtimes go to stdout only so the CSV stays byte-identical across runs
    os << "mechanism,revenue,value_of_information\n";
    std::cout << "mechanism            revenue          V*               runtime_ms\n";
    for (const auto& row : rows) {
        os << row.name << "," << fmt12(row.revenue) << "," << fmt12(row.revenue - no_info) << "\n";
        std::printf("%-20s %-16s %-16s %.3f\n", row.name.c_str(), fmt12(row.revenue).c_str(),
                    fmt12(row.revenue - no_info).c_str(), row.ms);
        if (row.name == "dp") dp_v = row.revenue;
        if (row.name == "prop8") p8_v = row.revenue;
    }
    write_file((std::filesystem::path(opt.out) / "compare.csv").string(), os.str());
    double scale = std::max(1.0, std::abs(p8_v));
    if (!(no_info <= dp_v + 1e-7 * scale && dp_v <= p8_v + 1e-7 * scale))
        throw NumericalFailure("sandwich ordering no-info <= dp <= prop8 violated");
    std::cout << "wrote compare.csv\n";
    return 0;
}

int cmd_scenarios(const Options& opt) {
    auto cfg = load_scenario_config(opt.input);
    auto design = dp_multi_scenario(cfg.net, cfg.scenarios, opt.eps);
    std::filesystem::path dir(opt.out);
    json report;
    report["scenarios"] = json::array();
    for (std::size_t k = 0; k < design.per_scenario.size(); ++k) {
        const auto& pv = design.per_scenario[k];
        json entry;
        entry["rho"] = cfg.scenarios[k].rho;
        entry["value"] = pv.value;
        entry["mechanism"] = mechanism_to_json(pv.mechanism);
        report["scenarios"].push_back(entry);
        std::cout << "scenario " << k << ": rho = " << fmt12(cfg.scenarios[k].rho)
                  << ", value = " << fmt12(pv.value) << "\n";
    }
    report["total_value"] = design.total_value;
    write_file((dir / "scenarios.json").string(), report.dump(2) + "\n");
    std::cout << "total value = " << fmt12(design.total_value) << "\n";
    std::cout << "wrote scenarios.json\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"information design for spatial repositioning markets"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--input", opt.input, "network+prior JSON config")->required();
        sub->add_option("--out", opt.out, "output directory");
        sub->add_option("--eps", opt.eps, "quantile step for DP / seed grid for prop8")
            ->check(CLI::Range(1e-6, 0.5));
        sub->add_option("--seed", opt.seed, "seed for randomized diagnostics");
        sub->add_option("--method", opt.method, "auto|alg1|prop8|dp")
            ->check(CLI::IsMember({"auto", "alg1", "prop8", "dp"}));
        return sub;
    };
    auto* c_validate = add_common(app.add_subcommand("validate", "check assumptions A1-A4"));
    auto* c_regimes = add_common(app.add_subcommand("regimes", "tabulate equilibrium regimes"));
    auto* c_design = add_common(app.add_subcommand("design", "design a disclosure mechanism"));
    auto* c_prop8 = add_common(app.add_subcommand("prop8", "solve the (p,y) program"));
    auto* c_dp = add_common(app.add_subcommand("dp", "quantile-grid dynamic program"));
    auto* c_compare = add_common(app.add_subcommand("compare", "compare design methods"));
    auto* c_scen = add_common(app.add_subcommand("scenarios", "scenario-based multi-shock design"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        std::filesystem::create_directories(opt.out);
        if (c_validate->parsed()) return cmd_validate(opt);
        if (c_regimes->parsed()) return cmd_regimes(opt);
        if (c_design->parsed()) return cmd_design(opt);
        if (c_prop8->parsed()) return cmd_prop8(opt);
        if (c_dp->parsed()) return cmd_dp(opt);
        if (c_compare->parsed()) return cmd_compare(opt);
        if (c_scen->parsed()) return cmd_scenarios(opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
