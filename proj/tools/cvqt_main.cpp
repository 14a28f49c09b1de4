// Command-line driver: figure-reproduction scans, cloning-bound convergence,
// and the randomized verification suites.
//
// Exit codes: 0 success, 1 verification failure, 2 usage/parameter error.

#include "cvqt/cloning.hpp"
#include "cvqt/gaussian.hpp"
#include "cvqt/network.hpp"
#include "cvqt/nongaussian.hpp"
#include "cvqt/teleport.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace cvqt;

std::ostream& open_output(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open output file: " + path);
    return file;
}

// ---------------------------------------------------------------------------
// verification suites

struct SuiteResult {
    std::string name;
    int checks = 0;
    int failures = 0;

    void expect(bool ok, const std::string& what) {
        ++checks;
        if (!ok) {
            ++failures;
            std::fprintf(stderr, "  [verify] %s: FAILED %s\n", name.c_str(), what.c_str());
        }
    }
};

GaussianState random_two_mode_state(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> sq(-1.0, 1.0);
    std::uniform_real_distribution<double> trans(0.05, 0.95);
    std::uniform_real_distribution<double> therm(0.0, 0.8);
    Eigen::MatrixXd d = 0.5 * Eigen::MatrixXd::Identity(4, 4);
    d(0, 0) = d(1, 1) = 0.5 + therm(rng);
    d(2, 2) = d(3, 3) = 0.5 + therm(rng);
    GaussianState state(2, d);
    auto s = compose(make_squeezer(sq(rng), Axis::X, 0, 2),
                     make_rotation(angle(rng), 0, 2));
    s = compose(make_squeezer(sq(rng), Axis::X, 1, 2), s);
    s = compose(make_beamsplitter(trans(rng), 0, 1, 2), s);
    s = compose(make_rotation(angle(rng), 1, 2), s);
    return apply_symplectic(s, state);
}

std::array<double, 3> random_triangle(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> pick(0.5, 3.0);
    for (;;) {
        const double a1 = pick(rng), a2 = pick(rng), a3 = pick(rng);
        const double q1 = a1 - 0.5, q2 = a2 - 0.5, q3 = a3 - 0.5;
        if (q1 <= q2 + q3 && q2 <= q1 + q3 && q3 <= q1 + q2) return {a1, a2, a3};
    }
}

SuiteResult verify_gaussian(std::mt19937_64& rng, int trials) {
    SuiteResult suite{"gaussian"};
    for (int t = 0; t < trials; ++t) {
        const auto state = random_two_mode_state(rng);
        const auto before = symplectic_spectrum(state);
        const auto rotated =
            apply_symplectic(make_beamsplitter(0.37, 0, 1, 2), state);
        const auto after = symplectic_spectrum(rotated);
        bool ok = true;
        for (std::size_t i = 0; i < before.size(); ++i)
            ok &= std::abs(before[i] - after[i]) < 1e-10;
        suite.expect(ok, "spectrum preservation");
    }
    for (int t = 0; t < trials; ++t) {
        const auto [a1, a2, a3] = random_triangle(rng);
        const auto state = three_mode_standard_cm(a1, a2, a3).to_state();
        bool pure = true;
        for (double nu : symplectic_spectrum(state)) pure &= std::abs(nu - 0.5) < 1e-8;
        suite.expect(pure, "standard-form purity");
        suite.expect(check_physical(state).physical, "standard-form physicality");
    }
    std::uniform_real_distribution<double> rdist(0.05, 1.8);
    for (int n : {1, 2, 5}) {
        const double rbar = rdist(rng);
        const auto state = network_symmetric_cm(n, rbar, rbar, 1.0, 1.0);
        const std::array<int, 1> sender{0};
        suite.expect(std::abs(pt_least_eigenvalue(assisted_pair_cm(state), sender) -
                              nu_assisted(n, 1.0, 1.0, rbar)) < 1e-9,
                     "assisted-pair PT eigenvalue");
    }
    {
        auto state = three_mode_standard_cm(1.4, 1.0, 1.0).to_state();
        state = phase_insensitive_channel(state, 1, 0.6, 0.2);
        bool zeros = true;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) zeros &= state.cm(2 * i, 2 * j + 1) == 0.0;
        suite.expect(zeros, "channel keeps x-p zeros");
    }
    {
        // negative control: a sub-vacuum fixture must be flagged unphysical
        const GaussianState bad(1, 0.25 * Eigen::Matrix2d::Identity());
        suite.expect(!check_physical(bad).physical, "unphysical fixture detection");
    }
    return suite;
}

SuiteResult verify_teleport(std::mt19937_64& rng, int trials) {
    SuiteResult suite{"teleport"};
    for (int t = 0; t < trials; ++t) {
        const auto state = random_two_mode_state(rng);
        suite.expect(std::abs(fidelity_cm(state) -
                              fidelity_from_moments(epr_moments(state))) < 1e-12,
                     "determinant route == moment route");
        const auto fixed = counter_rotation(state);
        suite.expect(std::abs(epr_moments(fixed.state).cxp) < 1e-10,
                     "counter-rotation zeroes the cross moment");
        suite.expect(std::abs(fidelity_cm(fixed.state) - fidelity_cm(state)) < 1e-10,
                     "counter-rotation preserves fidelity");
        const auto m = epr_moments(fixed.state);
        suite.expect(fidelity_from_moments(m) <=
                         1.0 / (1.0 + 2.0 * std::sqrt(m.vxm * m.vpp)) + 1e-12,
                     "fidelity bound chain");
    }
    std::uniform_real_distribution<double> sq(-1.0, 1.0);
    for (int t = 0; t < trials; ++t) {
        const auto [a1, a2, a3] = random_triangle(rng);
        const auto state = three_mode_standard_cm(a1, a2, a3).to_state();
        const std::array<int, 2> ab{0, 1}, ac{0, 2};
        auto sab = compose(make_squeezer(sq(rng), Axis::X, 1, 2),
                           make_squeezer(sq(rng), Axis::X, 0, 2));
        auto sac = compose(make_squeezer(sq(rng), Axis::X, 1, 2),
                           make_squeezer(sq(rng), Axis::X, 0, 2));
        const double prod =
            monogamy_product(apply_symplectic(sab, partial_trace(state, ab)),
                             apply_symplectic(sac, partial_trace(state, ac)));
        suite.expect(prod >= (1.0 / 256.0) * (1.0 - 1e-9), "uncertainty product bound");

        SqueezeOptions opts;
        opts.restarts = 2;
        const double plain = fidelity_cm(partial_trace(state, ab));
        suite.expect(optimize_local_squeezing(state, 0, 1, opts).fidelity >=
                         plain - 1e-12,
                     "optimization does not decrease fidelity");
    }
    return suite;
}

SuiteResult verify_fock(std::mt19937_64& rng, int trials) {
    SuiteResult suite{"fock"};
    std::uniform_real_distribution<double> rdist(0.1, 0.9);
    for (int t = 0; t < std::max(1, trials / 4); ++t) {
        const double r = rdist(rng);
        const int cutoff = 30;
        const auto mom = fock_moments(tmsv_fock(r, cutoff));
        suite.expect((mom.cm - tmsv_cm(r).cm).cwiseAbs().maxCoeff() < 1e-5,
                     "TMSV moments match the covariance builder");
        const auto sub = photon_jump(tmsv_fock(r, cutoff).normalized(), 0, Jump::Subtract);
        suite.expect(std::abs(sub.weight - std::sinh(r) * std::sinh(r)) < 1e-6,
                     "subtraction heralding weight");
    }
    {
        const auto bs = beamsplitter_fock(0.5, 10);
        const Eigen::MatrixXcd gram = bs.mat.adjoint() * bs.mat;
        suite.expect((gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols()))
                             .cwiseAbs()
                             .maxCoeff() < 1e-10,
                     "beam splitter unitarity");
        const Eigen::MatrixXcd d = displacement_matrix(std::complex<double>(0.6, 0.3), 32);
        const Eigen::MatrixXcd dinv =
            displacement_matrix(std::complex<double>(-0.6, -0.3), 32);
        const Eigen::MatrixXcd dd = d * dinv;
        suite.expect((dd.topLeftCorner(8, 8) - Eigen::MatrixXcd::Identity(8, 8))
                             .cwiseAbs()
                             .maxCoeff() < 1e-8,
                     "displacement inverse");
    }
    return suite;
}

SuiteResult verify_cloning(std::mt19937_64& rng, int trials) {
    SuiteResult suite{"cloning"};
    for (int n = 2; n <= 5; ++n) {
        const auto cloner = bogoliubov_cloner(n);
        const auto tele = bogoliubov_teleporter(n);
        suite.expect(cloner.commutator_defect() < 1e-12, "cloner commutators");
        suite.expect((cloner.u - tele.u).cwiseAbs().maxCoeff() < 1e-12 &&
                         (cloner.v - tele.v).cwiseAbs().maxCoeff() < 1e-12,
                     "teleporter equals cloner");
    }
    {
        const auto f = clone_fidelity_for(vacuum_fock(2, 14), 2);
        suite.expect(std::abs(f[0] - 2.0 / 3.0) < 1e-9, "vacuum cloning fidelity");
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto map = bogoliubov_cloner(2);
    for (int t = 0; t < std::max(1, trials / 20); ++t) {
        const int cutoff = 10;
        FockVector psi = vacuum_fock(2, cutoff);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                psi.amps(Eigen::Index(i) * (cutoff + 1) + j) =
                    std::complex<double>(gauss(rng), gauss(rng));
        psi.amps /= psi.norm();
        const auto direct = clone_fidelity_for(psi, 2);
        const double via_char = clone_fidelity_char(map, 0, psi, 40);
        suite.expect(std::abs(via_char - direct[0]) < 1e-8,
                     "characteristic-function route");
    }
    return suite;
}

SuiteResult verify_nongaussian(std::mt19937_64& rng, int trials) {
    SuiteResult suite{"nongaussian"};
    std::uniform_real_distribution<double> rdist(0.2, 0.9);
    for (int t = 0; t < std::max(1, trials / 10); ++t) {
        const double r = rdist(rng);
        const int cutoff = required_cutoff(r, 1e-9);
        const double f = teleport_fidelity_fock(tmsv_fock(r, cutoff).normalized());
        suite.expect(std::abs(f - 1.0 / (1.0 + std::exp(-2.0 * r))) < 1e-6,
                     "TMSV fidelity matches the Gaussian formula");
    }
    {
        const auto v = tmsv_fock(0.5, 10).normalized();
        PureEnsemble e;
        e.cutoff = 10;
        e.weights.push_back(1.0);
        e.vectors.push_back(v.amps);
        suite.expect(std::abs(teleport_fidelity_fock(e) - teleport_fidelity_grid(e)) <
                         1e-9,
                     "kernel equals the grid integral");
    }
    {
        const auto base = build_three_mode_fock(0.7, 24);
        const auto res =
            apply_pattern(base, OperationPattern{ModeOp::Subtract, ModeOp::None});
        const std::array<int, 2> ab{0, 1}, ac{0, 2};
        const double fab = teleport_fidelity_fock(pair_ensemble(res.state, ab));
        const double fac = teleport_fidelity_fock(pair_ensemble(res.state, ac));
        suite.expect(std::abs(fab - fac) < 1e-12, "receiver exchange symmetry");
        suite.expect(fab <= 2.0 / 3.0 + 5e-3, "no pattern beats the Gaussian bound");
    }
    return suite;
}

SuiteResult verify_network(std::mt19937_64& rng, int trials) {
    SuiteResult suite{"network"};
    std::uniform_real_distribution<double> rdist(0.05, 1.8);
    std::uniform_real_distribution<double> ddist(-0.8, 0.8);
    for (int t = 0; t < std::max(1, trials / 5); ++t) {
        const int n = 1 + static_cast<int>(rng() % 5);
        const double rbar = rdist(rng);
        const double d = ddist(rng);
        const auto state = network_symmetric_cm(n, rbar - d, rbar + d, 1.0, 1.0);
        const std::array<int, 1> sender{0};
        suite.expect(std::abs(pt_least_eigenvalue(assisted_pair_cm(state), sender) -
                              nu_assisted(n, 1.0, 1.0, rbar)) < 1e-9,
                     "assisted PT eigenvalue independent of the squeezing split");
        const std::array<int, 2> pair{0, 1};
        suite.expect(std::abs(pt_least_eigenvalue(partial_trace(state, pair), sender) -
                              nu_pair(n, 1.0, 1.0, rbar)) < 1e-9,
                     "pair PT eigenvalue matches the closed form");
    }
    {
        const auto opt = optimize_protocol(2, 1.0, 1.0, 0.5);
        suite.expect(std::abs(opt.fidelity -
                              fidelity_from_nu(nu_assisted(2, 1.0, 1.0, 0.5))) < 1e-6,
                     "protocol optimum");
        const std::array<double, 1> r{0.01};
        suite.expect(asymptotic_check(2, r) * 1e-6 < 1e-5, "asymptotic expansion");
        suite.expect(capability_report(2, 1e-3, 1.0).ratio > 0.99, "ratio limit");
        suite.expect(monogamy_gap(2, 0.05, 1.0).violated, "small-squeezing violation");
    }
    return suite;
}

int cmd_verify(std::uint64_t seed, int trials) {
    std::mt19937_64 rng(seed);
    std::vector<SuiteResult> suites;
    suites.push_back(verify_gaussian(rng, trials));
    suites.push_back(verify_teleport(rng, trials));
    suites.push_back(verify_fock(rng, trials));
    suites.push_back(verify_cloning(rng, trials));
    suites.push_back(verify_nongaussian(rng, trials));
    suites.push_back(verify_network(rng, trials));

    int total = 0, failed = 0;
    for (const auto& s : suites) {
        std::printf("%-12s %4d checks, %d failures\n", s.name.c_str(), s.checks,
                    s.failures);
        total += s.checks;
        failed += s.failures;
    }
    std::printf("verify: %d/%d checks passed\n", total - failed, total);
    return failed == 0 ? 0 : 1;
}

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"continuous-variable teleportation and cloning toolkit"};
    app.require_subcommand(1);

    // region-scan
    auto* region = app.add_subcommand(
        "region-scan", "two-receiver fidelity map over the (c2, c3) plane");
    double a1 = 1.5;
    int grid = 201;
    bool optimize = false;
    std::uint64_t seed = 1;
    std::string out_path;
    std::string format = "csv";
    region->add_option("--a1", a1, "sender local diagonal (> 1/2)");
    region->add_option("--grid", grid, "points per axis");
    region->add_flag("--optimize", optimize, "optimize local squeezing per pair");
    region->add_option("--seed", seed, "seed for optimizer restarts");
    region->add_option("--out", out_path, "output path (default stdout)");
    region->add_option("--format", format, "csv or json");

    // nongauss-scan
    auto* nongauss = app.add_subcommand(
        "nongauss-scan", "photon add/subtract fidelity scan over the squeezing");
    std::string patterns_arg = "all";
    double rmin = 0.0, rmax = 1.5, rstep = 0.05;
    int cutoff = 24;
    nongauss->add_option("--patterns", patterns_arg,
                         "comma list of patterns, or 'all'");
    nongauss->add_option("--rmin", rmin, "squeezing grid start");
    nongauss->add_option("--rmax", rmax, "squeezing grid end");
    nongauss->add_option("--rstep", rstep, "squeezing grid step");
    nongauss->add_option("--cutoff", cutoff, "photon-number cutoff (raised as needed)");
    nongauss->add_option("--seed", seed, "unused; accepted for uniformity");
    nongauss->add_option("--out", out_path, "output path (default stdout)");
    nongauss->add_option("--format", format, "csv or json");

    // network-scan
    auto* network = app.add_subcommand(
        "network-scan", "capability monogamy scan for symmetric network states");
    std::string n_list_arg = "2,5,10";
    std::string alpha_arg = "1,2,4,8";
    int rpoints = 200;
    network->add_option("--n-list", n_list_arg, "receiver counts");
    network->add_option("--alpha", alpha_arg, "monogamy orders");
    network->add_option("--grid", rpoints, "points of the log squeezing grid");
    network->add_option("--out", out_path, "output path (default stdout)");
    network->add_option("--format", format, "csv or json");

    // clone-opt
    auto* clone = app.add_subcommand(
        "clone-opt", "optimal cloning-fidelity convergence report");
    std::string cutoff_arg = "16,24,32,40";
    std::string clone_n_arg = "2";
    clone->add_option("--n-list", clone_n_arg, "number of clones (single value)");
    clone->add_option("--cutoff", cutoff_arg, "cutoff ladder");
    clone->add_option("--out", out_path, "output path (default stdout)");

    // verify
    auto* verify = app.add_subcommand("verify", "randomized invariant suites");
    int trials = 200;
    verify->add_option("--seed", seed, "random seed");
    verify->add_option("--trials", trials, "sample count per suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        std::ofstream file;
        if (region->parsed()) {
            RegionScanOptions opts;
            opts.grid_points = grid;
            opts.optimize = optimize;
            opts.seed = seed;
            const auto cells = region_scan(a1, opts);
            auto& out = open_output(file, out_path);
            if (format == "json") {
                nlohmann::json rows = nlohmann::json::array();
                for (const auto& c : cells)
                    rows.push_back({{"c2", c.c2},
                                    {"c3", c.c3},
                                    {"F_AB", c.f_ab},
                                    {"F_AC", c.f_ac},
                                    {"feasible", c.feasible}});
                out << nlohmann::json{{"schema", "1"}, {"cells", rows}}.dump(2) << "\n";
            } else {
                write_region_csv(out, cells);
            }
        } else if (nongauss->parsed()) {
            std::vector<OperationPattern> patterns;
            if (patterns_arg == "all") {
                patterns = fig5_patterns();
                patterns.push_back(OperationPattern{});  // Gaussian reference
            } else {
                std::stringstream ss(patterns_arg);
                std::string item;
                while (std::getline(ss, item, ','))
                    patterns.push_back(OperationPattern::parse(item));
            }
            if (rstep <= 0.0 || rmax < rmin)
                throw std::invalid_argument("nongauss-scan: bad squeezing grid");
            std::vector<double> rs;
            for (double r = rmin; r <= rmax + 1e-12; r += rstep) rs.push_back(r);
            Fig5Options opts;
            opts.cutoff = cutoff;
            const auto rows = fig5_scan(patterns, rs, opts);
            auto& out = open_output(file, out_path);
            if (format == "json") {
                nlohmann::json jrows = nlohmann::json::array();
                for (const auto& r : rows)
                    jrows.push_back({{"pattern", r.pattern},
                                     {"r", r.r},
                                     {"F", r.fidelity},
                                     {"herald_weight", r.herald_weight},
                                     {"cutoff", r.cutoff},
                                     {"leakage", r.leakage}});
                out << nlohmann::json{{"schema", "1"}, {"rows", jrows}}.dump(2) << "\n";
            } else {
                write_fig5_csv(out, rows);
            }
        } else if (network->parsed()) {
            const auto ns = parse_int_list(n_list_arg);
            const auto alphas = parse_double_list(alpha_arg);
            const auto grid_r = log_grid(1e-3, 2.0, rpoints);
            std::vector<CapabilityReport> rows;
            for (int n : ns)
                for (double alpha : alphas)
                    for (double r : grid_r)
                        rows.push_back(capability_report(n, r, alpha));
            auto& out = open_output(file, out_path);
            if (format == "json") {
                nlohmann::json jrows = nlohmann::json::array();
                for (const auto& r : rows)
                    jrows.push_back({{"N", r.receivers},
                                     {"rbar", r.rbar},
                                     {"alpha", r.alpha},
                                     {"C_collective", r.c_collective},
                                     {"C_pair", r.c_pair},
                                     {"gap", r.gap},
                                     {"ratio", r.ratio}});
                out << nlohmann::json{{"schema", "1"}, {"rows", jrows}}.dump(2) << "\n";
            } else {
                write_network_csv(out, rows);
            }
        } else if (clone->parsed()) {
            const auto ns = parse_int_list(clone_n_arg);
            const auto cutoffs = parse_int_list(cutoff_arg);
            if (ns.size() != 1)
                throw std::invalid_argument("clone-opt: exactly one clone count");
            CloneConvergence report;
            report.clones = ns[0];
            for (int c : cutoffs) {
                report.cutoffs.push_back(c);
                report.fidelities.push_back(clone_optimum_value(ns[0], c));
            }
            nlohmann::json j = report;
            auto& out = open_output(file, out_path);
            out << j.dump(2) << "\n";
        } else if (verify->parsed()) {
            return cmd_verify(seed, trials);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
