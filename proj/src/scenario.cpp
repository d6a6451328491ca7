#include "dsrcsim/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "dsrcsim/errors.hpp"

namespace dsrcsim {

void ScenarioConfig::validate() const {
    if (!(warmup_s >= 0.0) || !(warmup_s < horizon_s)) {
        throw ConfigError("scenario: need 0 <= warmup_s < horizon_s");
    }
    if (replications < 1) throw ConfigError("scenario: replications must be >= 1");
    world_config().validate();
}

WorldConfig ScenarioConfig::world_config() const {
    WorldConfig w;
    w.network = network;
    if (w.network.policy == LanePolicy::Dla && w.network.access_zones.empty() &&
        w.network.length_m >= 5500.0) {
        w.network.access_zones = {{2000.0, 2500.0}, {5000.0, 5500.0}};
    }
    w.demand = demand;
    w.dsrc = dsrc;
    w.controller = controller;
    w.idm = idm;
    w.lane_change = lane_change;
    w.table = table;
    w.dt_s = dt_s;
    w.control_every = control_every;
    w.vehicle_length_m = vehicle_length_m;
    w.platoon_link_factor = platoon_link_factor;
    w.reception_override = reception_override;
    return w;
}

ReplicationResult run_replication(const ScenarioConfig& config, int replication_index,
                                  const ReplicationSinks* sinks) {
    ReplicationResult result;
    result.replication = replication_index;
    result.seed = replication_seed(config.base_seed, replication_index);

    World world(config.world_config(), result.seed);
    for (const auto& ev : config.injected_events) world.schedule(ev);

    const double warmup = config.warmup_s;
    world.on_reception = [&](const ReceptionRecord& rec) {
        if (rec.time_s >= warmup && rec.mode == ControlMode::CaccPlatooned) {
            ++result.trials;
            if (rec.success) ++result.successes;
            result.xi_samples.push_back(rec.xi_events);
        }
        if (sinks && sinks->reception) sinks->reception(rec);
    };
    world.on_fallback = [&](const FallbackRecord& rec) {
        if (rec.time_s >= warmup && rec.from == ControlMode::CaccPlatooned &&
            rec.to == ControlMode::AccFallback) {
            if (rec.cause == to_string(FallbackEvent::PacketDrop)) ++result.fallback_packet_drop;
            if (rec.cause == to_string(FallbackEvent::InfeasibleSolution)) {
                ++result.fallback_infeasible;
            }
        }
        if (sinks && sinks->fallback) sinks->fallback(rec);
    };

    const auto steps = static_cast<std::int64_t>(std::llround(config.horizon_s / config.dt_s));
    std::uint64_t retired_at_warmup = 0;
    try {
        for (std::int64_t n = 0; n < steps; ++n) {
            world.step();
            if (world.now_s() <= warmup) retired_at_warmup = world.retired_total();
            if (sinks && sinks->trajectory) {
                for (const auto& v : world.vehicles()) sinks->trajectory(world.now_s(), v);
            }
        }
    } catch (const InvariantError& err) {
        result.failed = true;
        result.diagnostic = err.what();
    }

    result.spawned = world.spawned_total();
    result.retired = world.retired_total();
    result.remaining = world.vehicles().size();
    result.retired_post_warmup = world.retired_total() - retired_at_warmup;
    const double window_s = config.horizon_s - warmup;
    result.throughput_vph =
        window_s > 0.0 ? static_cast<double>(result.retired_post_warmup) / window_s * 3600.0
                       : 0.0;
    result.reception_diag = world.reception_diagnostics();
    return result;
}

MetricsAggregate aggregate(std::span<const ReplicationResult> results) {
    if (results.empty()) throw std::invalid_argument("aggregate: no replication results");
    MetricsAggregate agg;
    std::vector<double> pooled;
    double throughput_sum = 0.0;
    for (const auto& r : results) {
        if (r.failed) continue;
        ++agg.replications_used;
        agg.trials += r.trials;
        agg.successes += r.successes;
        pooled.insert(pooled.end(), r.xi_samples.begin(), r.xi_samples.end());
        agg.fallback_packet_drop += r.fallback_packet_drop;
        agg.fallback_infeasible += r.fallback_infeasible;
        throughput_sum += r.throughput_vph;
    }
    if (agg.replications_used == 0) {
        throw std::invalid_argument("aggregate: every replication failed");
    }
    if (agg.trials > 0) {
        agg.reception_rate =
            static_cast<double>(agg.successes) / static_cast<double>(agg.trials);
    }
    agg.xi = summarize(std::move(pooled));
    agg.mean_throughput_vph = throughput_sum / agg.replications_used;
    return agg;
}

std::vector<SweepCell> sweep(const ScenarioConfig& base, std::span<const LanePolicy> policies,
                             std::span<const double> mprs, int jobs) {
    if (policies.empty() || mprs.empty()) {
        throw std::invalid_argument("sweep: need at least one policy and one MPR");
    }
    std::vector<SweepCell> cells;
    cells.reserve(policies.size() * mprs.size());
    for (const auto policy : policies) {
        for (const auto mpr : mprs) {
            SweepCell cell;
            cell.policy = policy;
            cell.mpr = mpr;
            cell.results.resize(static_cast<std::size_t>(base.replications));
            cells.push_back(std::move(cell));
        }
    }

    struct Task {
        std::size_t cell;
        int replication;
    };
    std::vector<Task> tasks;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        for (int r = 0; r < base.replications; ++r) tasks.push_back({c, r});
    }

    const auto run_task = [&](const Task& task) {
        ScenarioConfig cfg = base;
        cfg.network.policy = cells[task.cell].policy;
        if (cfg.network.policy != LanePolicy::Dla) cfg.network.access_zones.clear();
        cfg.demand.mpr = cells[task.cell].mpr;
        cells[task.cell].results[static_cast<std::size_t>(task.replication)] =
            run_replication(cfg, task.replication);
    };

    int workers = jobs > 0 ? jobs : base.replications;
    workers = std::min<int>(workers, static_cast<int>(tasks.size()));
    if (workers <= 1) {
        for (const auto& t : tasks) run_task(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t t = next.fetch_add(1);
                    if (t >= tasks.size()) return;
                    run_task(tasks[t]);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    for (auto& cell : cells) {
        try {
            cell.metrics = aggregate(cell.results);
            cell.usable = true;
        } catch (const std::invalid_argument& err) {
            cell.usable = false;
            cell.error = err.what();
        }
    }
    return cells;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void write_stats_fields(std::ostream& out, const SampleStats& s) {
    if (s.n == 0) {
        out << ",,,,,,";  // seven empty fields
        return;
    }
    out << fmt(s.mean) << ',' << fmt(s.median) << ',' << fmt(s.variance) << ',' << fmt(s.q1)
        << ',' << fmt(s.q3) << ',' << fmt(s.min) << ',' << fmt(s.max);
}

}  // namespace

void write_summary_csv(std::ostream& out, std::span<const SweepCell> cells) {
    out << "# dsrcsim summary v1 | reception_rate: trial successes / trials (success within 5 "
           "attempts) | xi stats: per-trial communication density, post-warm-up | variance: "
           "sample (n-1) | quantiles: linear interpolation\n";
    out << "strategy,mpr,replication,trials,successes,reception_rate,xi_mean,xi_median,xi_var,"
           "xi_q1,xi_q3,xi_min,xi_max,fallback_packet_drop,fallback_infeasible,throughput_vph\n";
    for (const auto& cell : cells) {
        for (const auto& r : cell.results) {
            if (r.failed) continue;  // reported separately, never aggregated
            out << to_string(cell.policy) << ',' << fmt(cell.mpr) << ',' << r.replication << ','
                << r.trials << ',' << r.successes << ',';
            if (const auto rate = r.reception_rate()) out << fmt(*rate);
            out << ',';
            write_stats_fields(out, summarize(r.xi_samples));
            out << ',' << r.fallback_packet_drop << ',' << r.fallback_infeasible << ','
                << fmt(r.throughput_vph) << '\n';
        }
        if (!cell.usable) continue;
        const auto& m = cell.metrics;
        out << to_string(cell.policy) << ',' << fmt(cell.mpr) << ",pooled," << m.trials << ','
            << m.successes << ',';
        if (m.reception_rate) out << fmt(*m.reception_rate);
        out << ',';
        write_stats_fields(out, m.xi);
        out << ',' << m.fallback_packet_drop << ',' << m.fallback_infeasible << ','
            << fmt(m.mean_throughput_vph) << '\n';
    }
}

}  // namespace dsrcsim
