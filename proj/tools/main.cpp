#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "dsrcsim/config.hpp"
#include "dsrcsim/csvio.hpp"
#include "dsrcsim/errors.hpp"
#include "dsrcsim/scenario.hpp"

namespace {

using namespace dsrcsim;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitIo = 4;

std::filesystem::path resolve_output_dir(const std::string& flag_value) {
    if (const char* env = std::getenv("DSRCSIM_OUTPUT_DIR"); env && *env) {
        return env;
    }
    return flag_value;
}

void write_reception_header(std::ostream& out) {
    out << "# dsrcsim reception log v1\n"
        << "time_s,vehicle_id,x_m,delta_veh_per_km,xi,p,attempts_used,success\n";
}

void write_fallback_header(std::ostream& out) {
    out << "# dsrcsim fallback log v1\n"
        << "time_s,vehicle_id,from_mode,event,to_mode\n";
}

void write_trajectory_header(std::ostream& out) {
    out << "# dsrcsim trajectory log v1\n"
        << "time_s,vehicle_id,lane,position_m,speed_mps,mode\n";
}

struct LogFlags {
    bool reception = false;
    bool fallback = false;
    bool trajectory = false;
};

// Runs every replication of one scenario cell, streaming any enabled logs
// to per-replication files. Log files commit only for clean replications.
SweepCell run_cell(const ScenarioConfig& cfg, const std::filesystem::path& out_dir,
                   const LogFlags& logs, int jobs, bool verbose) {
    SweepCell cell;
    cell.policy = cfg.network.policy;
    cell.mpr = cfg.demand.mpr;
    cell.results.resize(static_cast<std::size_t>(cfg.replications));

    std::mutex print_mutex;
    const auto run_one = [&](int rep) {
        std::optional<AtomicFileWriter> reception, fallback, trajectory;
        ReplicationSinks sinks;
        if (logs.reception) {
            reception.emplace(out_dir / ("reception_rep" + std::to_string(rep) + ".csv"));
            write_reception_header(reception->stream());
            sinks.reception = [&](const ReceptionRecord& r) {
                reception->stream() << format_double(r.time_s) << ',' << r.vehicle << ','
                                    << format_double(r.x_m) << ','
                                    << format_double(r.delta_veh_per_km) << ','
                                    << format_double(r.xi_events) << ','
                                    << format_double(r.probability) << ',' << r.attempts_used
                                    << ',' << (r.success ? 1 : 0) << '\n';
            };
        }
        if (logs.fallback) {
            fallback.emplace(out_dir / ("fallback_rep" + std::to_string(rep) + ".csv"));
            write_fallback_header(fallback->stream());
            sinks.fallback = [&](const FallbackRecord& r) {
                fallback->stream() << format_double(r.time_s) << ',' << r.vehicle << ','
                                   << to_string(r.from) << ',' << r.cause << ','
                                   << to_string(r.to) << '\n';
            };
        }
        if (logs.trajectory) {
            trajectory.emplace(out_dir / ("trajectory_rep" + std::to_string(rep) + ".csv"));
            write_trajectory_header(trajectory->stream());
            sinks.trajectory = [&](double t, const Vehicle& v) {
                trajectory->stream() << format_double(t) << ',' << v.id << ',' << v.lane << ','
                                     << format_double(v.position_m) << ','
                                     << format_double(v.speed) << ',' << to_string(v.mode)
                                     << '\n';
            };
        }

        auto& slot = cell.results[static_cast<std::size_t>(rep)];
        slot = run_replication(cfg, rep, &sinks);
        if (!slot.failed) {
            if (reception) reception->commit();
            if (fallback) fallback->commit();
            if (trajectory) trajectory->commit();
        }
        if (verbose) {
            std::lock_guard lock(print_mutex);
            std::ostringstream line;
            line << "replication " << rep << ": ";
            if (slot.failed) {
                line << "FAILED (" << slot.diagnostic << ")";
            } else {
                line << slot.trials << " trials";
                if (const auto rate = slot.reception_rate()) {
                    line << ", reception rate " << format_double(*rate);
                }
            }
            std::cerr << line.str() << '\n';
        }
    };

    int workers = jobs > 0 ? jobs : cfg.replications;
    workers = std::min(workers, cfg.replications);
    if (workers <= 1) {
        for (int rep = 0; rep < cfg.replications; ++rep) run_one(rep);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const int rep = next.fetch_add(1);
                    if (rep >= cfg.replications) return;
                    run_one(rep);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    try {
        cell.metrics = aggregate(cell.results);
        cell.usable = true;
    } catch (const std::invalid_argument& err) {
        cell.usable = false;
        cell.error = err.what();
    }
    return cell;
}

// Failed replications are excluded from summaries and reported separately.
int report_failures(std::span<const SweepCell> cells, const std::filesystem::path& out_dir) {
    int failures = 0;
    std::ostringstream body;
    for (const auto& cell : cells) {
        for (const auto& r : cell.results) {
            if (!r.failed) continue;
            ++failures;
            body << to_string(cell.policy) << ',' << format_double(cell.mpr) << ','
                 << r.replication << ",\"" << r.diagnostic << "\"\n";
            std::cerr << "replication failed: " << to_string(cell.policy) << " mpr "
                      << format_double(cell.mpr) << " rep " << r.replication << ": "
                      << r.diagnostic << '\n';
        }
    }
    if (failures > 0) {
        AtomicFileWriter out(out_dir / "failures.csv");
        out.stream() << "# dsrcsim failures v1\nstrategy,mpr,replication,diagnostic\n"
                     << body.str();
        out.commit();
    }
    return failures;
}

int cmd_run(const std::string& config_path, const std::string& out_flag,
            std::optional<std::uint64_t> seed, std::optional<int> replications,
            const LogFlags& logs, int jobs, bool verbose) {
    ScenarioConfig cfg = load_scenario_file(config_path);
    if (seed) cfg.base_seed = *seed;
    if (replications) cfg.replications = *replications;
    cfg.validate();

    const auto out_dir = resolve_output_dir(out_flag);
    const auto cell = run_cell(cfg, out_dir, logs, jobs, verbose);

    AtomicFileWriter summary(out_dir / "summary.csv");
    const SweepCell cells[] = {cell};
    write_summary_csv(summary.stream(), cells);
    summary.commit();
    const int failures = report_failures(cells, out_dir);

    if (!cell.usable) {
        std::cerr << "no usable replication: " << cell.error << '\n';
        return kExitInvariant;
    }
    std::cout << to_string(cell.policy) << " mpr " << format_double(cell.mpr) << ": "
              << cell.metrics.trials << " trials";
    if (cell.metrics.reception_rate) {
        std::cout << ", reception rate " << format_double(*cell.metrics.reception_rate);
    }
    std::cout << ", mean xi " << format_double(cell.metrics.xi.mean) << ", throughput "
              << format_double(cell.metrics.mean_throughput_vph) << " vph\n";
    if (verbose) {
        ReceptionDiagnostics diag;
        for (const auto& r : cell.results) {
            if (!r.failed) diag.merge(r.reception_diag);
        }
        std::cerr << "model diagnostics: clamped_high " << diag.clamped_high
                  << ", clamped_low " << diag.clamped_low << ", xi_above_domain "
                  << diag.xi_above_domain << ", x_beyond_range " << diag.x_beyond_range
                  << '\n';
    }
    std::cout << "summary: " << (out_dir / "summary.csv").string() << '\n';
    return failures > 0 ? kExitInvariant : kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& out_flag,
              const std::string& strategies_csv, const std::string& mprs_csv,
              std::optional<std::uint64_t> seed, int jobs, bool verbose) {
    ScenarioConfig cfg = load_scenario_file(config_path);
    if (seed) cfg.base_seed = *seed;

    std::vector<LanePolicy> policies;
    {
        std::istringstream in(strategies_csv);
        std::string tok;
        while (std::getline(in, tok, ',')) {
            const auto p = parse_lane_policy(tok);
            if (!p) throw ConfigError("unknown strategy '" + tok + "'");
            policies.push_back(*p);
        }
    }
    std::vector<double> mprs;
    {
        std::istringstream in(mprs_csv);
        std::string tok;
        while (std::getline(in, tok, ',')) {
            try {
                mprs.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw ConfigError("bad MPR value '" + tok + "'");
            }
        }
    }
    if (policies.empty() || mprs.empty()) {
        throw ConfigError("sweep needs at least one strategy and one MPR");
    }

    const auto cells = sweep(cfg, policies, mprs, jobs);

    const auto out_dir = resolve_output_dir(out_flag);
    AtomicFileWriter summary(out_dir / "summary.csv");
    write_summary_csv(summary.stream(), cells);
    summary.commit();
    const int failures = report_failures(cells, out_dir);

    if (verbose) {
        for (const auto& cell : cells) {
            std::cerr << to_string(cell.policy) << " mpr " << format_double(cell.mpr) << ": "
                      << (cell.usable ? "ok" : cell.error) << '\n';
        }
    }
    std::cout << "sweep: " << cells.size() << " cells, summary "
              << (out_dir / "summary.csv").string() << '\n';
    return failures > 0 ? kExitInvariant : kExitOk;
}

int cmd_curves(const std::string& xi_csv, double phi, double f_hz, double xmax, double dx,
               const std::string& out_path, const std::string& table_path) {
    const CoefficientTable table =
        table_path.empty() ? CoefficientTable::builtin() : CoefficientTable::from_file(table_path);
    std::vector<double> xis;
    std::istringstream in(xi_csv);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        try {
            xis.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ConfigError("bad xi value '" + tok + "'");
        }
    }
    if (xis.empty()) throw ConfigError("curves needs at least one xi");
    if (!(phi > 0.0) || !(dx > 0.0) || xmax < 0.0) {
        throw ConfigError("curves: need phi > 0, dx > 0, xmax >= 0");
    }

    std::ostringstream body;
    body << "# dsrcsim curves v1 | phi_m=" << format_double(phi)
         << " f_hz=" << format_double(f_hz) << '\n';
    body << "x_m,xi,p\n";
    for (const double xi : xis) {
        const auto steps = static_cast<long>(xmax / dx + 0.5);
        for (long k = 0; k <= steps; ++k) {
            const double x = static_cast<double>(k) * dx;
            body << format_double(x) << ',' << format_double(xi) << ','
                 << format_double(reception_probability(table, x, xi, phi)) << '\n';
        }
    }
    if (out_path.empty() || out_path == "-") {
        std::cout << body.str();
    } else {
        AtomicFileWriter out(out_path);
        out.stream() << body.str();
        out.commit();
    }
    return kExitOk;
}

int cmd_validate(const std::string& table_path) {
    const CoefficientTable table =
        table_path.empty() ? CoefficientTable::builtin() : CoefficientTable::from_file(table_path);

    table.write(std::cout);
    char checksum[32];
    std::snprintf(checksum, sizeof checksum, "%016llx",
                  static_cast<unsigned long long>(table.checksum()));
    std::cout << "entries: 60\nchecksum: fnv1a64:" << checksum << '\n';

    int failed = 0;
    const auto report = [&](bool ok, const std::string& name) {
        std::cout << (ok ? "PASS" : "FAIL") << "  " << name << '\n';
        if (!ok) ++failed;
    };

    bool unity = true;
    for (double xi = 0.0; xi <= 4400.0; xi += 200.0) {
        for (double phi : {100.0, 300.0, 500.0, 1000.0}) {
            unity &= std::abs(reception_probability(table, 0.0, xi, phi) - 1.0) <= 1e-12;
        }
    }
    report(unity, "reception at zero distance is exactly 1");

    bool monotone_x = true;
    for (double xi : {500.0, 1500.0, 3000.0}) {
        double prev = 2.0;
        for (int x = 0; x <= 300; ++x) {
            const double p = reception_probability(table, x, xi, 300.0);
            monotone_x &= p <= prev + 1e-15;
            prev = p;
        }
    }
    report(monotone_x, "non-increasing in distance (xi 500/1500/3000, phi 300)");

    bool monotone_xi = true;
    double prev = 2.0;
    for (double xi = 0.0; xi <= 4400.0; xi += 100.0) {
        const double p = reception_probability(table, 150.0, xi, 300.0);
        monotone_xi &= p <= prev + 1e-15;
        prev = p;
    }
    report(monotone_xi, "non-increasing in channel load at x=150");

    bool bounded = true;
    for (double xi = 0.0; xi <= 4400.0; xi += 100.0) {
        for (int x = 0; x <= 300; x += 2) {
            const double p = reception_probability(table, x, xi, 300.0);
            bounded &= p >= 0.0 && p <= 1.0;
        }
    }
    report(bounded, "probability bounded to [0,1] across the domain");

    bool sensitive = true;
    const struct {
        double x, xi, phi;
    } probes[] = {{300.0, 4400.0, 300.0},
                  {1000.0, 4400.0, 1000.0},
                  {1000.0, 0.0, 1000.0},
                  {500.0, 2200.0, 1000.0},
                  {150.0, 4400.0, 300.0}};
    for (int i = 1; i <= 4; ++i) {
        for (int j = 0; j <= 4; ++j) {
            for (int k = 0; j + k <= 4; ++k) {
                CoefficientTable crippled = table;
                crippled.set(i, j, k, 0.0);
                double max_diff = 0.0;
                for (const auto& pr : probes) {
                    max_diff = std::max(
                        max_diff,
                        std::abs(reception_probability_raw(crippled, pr.x, pr.xi, pr.phi) -
                                 reception_probability_raw(table, pr.x, pr.xi, pr.phi)));
                }
                sensitive &= max_diff > 1e-13;
            }
        }
    }
    report(sensitive, "every coefficient term detectably contributes");

    if (failed == 0) {
        std::cout << "all checks passed\n";
        return kExitOk;
    }
    std::cout << failed << " check(s) failed\n";
    return kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Microscopic freeway CACC simulator with an analytical DSRC reception model"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> replications;
    LogFlags logs;
    int jobs = 0;
    bool verbose = false;

    auto* run = app.add_subcommand("run", "Run one scenario (all replications)");
    run->add_option("--config", config_path, "Scenario file")->required();
    run->add_option("--out", out_dir, "Output directory (env DSRCSIM_OUTPUT_DIR overrides)");
    run->add_option("--seed", seed, "Override base_seed");
    run->add_option("--replications", replications, "Override replication count");
    run->add_option("--jobs", jobs, "Parallel replications (default: replication count)");
    run->add_flag("--reception-log", logs.reception, "Write per-trial reception CSVs");
    run->add_flag("--fallback-log", logs.fallback, "Write fallback transition CSVs");
    run->add_flag("--trajectory-log", logs.trajectory, "Write per-step trajectory CSVs (large)");
    run->add_flag("-v,--verbose", verbose, "Progress to stderr");

    std::string strategies_csv = "BASE,UML,MML,DL,DLA";
    std::string mprs_csv = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0";
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a strategy x MPR matrix");
    sweep_cmd->add_option("--config", config_path, "Scenario file")->required();
    sweep_cmd->add_option("--out", out_dir,
                          "Output directory (env DSRCSIM_OUTPUT_DIR overrides)");
    sweep_cmd->add_option("--strategies", strategies_csv, "Comma-separated strategies");
    sweep_cmd->add_option("--mprs", mprs_csv, "Comma-separated MPR fractions");
    sweep_cmd->add_option("--seed", seed, "Override base_seed");
    sweep_cmd->add_option("--jobs", jobs, "Parallel replications (default: replication count)");
    sweep_cmd->add_flag("-v,--verbose", verbose, "Progress to stderr");

    std::string xi_csv = "500,1500,3000";
    double phi = 300.0, f_hz = 10.0, xmax = 300.0, dx = 1.0;
    std::string curves_out, table_path;
    auto* curves = app.add_subcommand("curves", "Emit reception-probability curves as CSV");
    curves->add_option("--xi", xi_csv, "Comma-separated communication densities");
    curves->add_option("--phi", phi, "Transmission range, m");
    curves->add_option("--f", f_hz, "Broadcast frequency, Hz (reported in the header)");
    curves->add_option("--xmax", xmax, "Largest distance, m");
    curves->add_option("--dx", dx, "Distance step, m");
    curves->add_option("--out", curves_out, "Output file ('-' or empty: stdout)");
    curves->add_option("--table", table_path, "Coefficient table file (default: built-in)");

    auto* validate = app.add_subcommand("validate-coefficients",
                                        "Print the coefficient table and run sanity checks");
    validate->add_option("--table", table_path, "Coefficient table file (default: built-in)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (app.got_subcommand(run)) {
            return cmd_run(config_path, out_dir, seed, replications, logs, jobs, verbose);
        }
        if (app.got_subcommand(sweep_cmd)) {
            return cmd_sweep(config_path, out_dir, strategies_csv, mprs_csv, seed, jobs,
                             verbose);
        }
        if (app.got_subcommand(curves)) {
            return cmd_curves(xi_csv, phi, f_hz, xmax, dx, curves_out, table_path);
        }
        if (app.got_subcommand(validate)) {
            return cmd_validate(table_path);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InvariantError& e) {
        std::cerr << "invariant breach: " << e.what() << '\n';
        return kExitInvariant;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitConfig;
}
