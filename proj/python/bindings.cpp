#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "dsrcsim/channel.hpp"
#include "dsrcsim/config.hpp"
#include "dsrcsim/errors.hpp"
#include "dsrcsim/scenario.hpp"
#include "dsrcsim/traffic.hpp"

namespace py = pybind11;
using namespace dsrcsim;

PYBIND11_MODULE(_dsrcsim, m) {
    m.doc() = "Microscopic freeway CACC simulation with an analytical DSRC reception model";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<InvariantError>(m, "InvariantError", PyExc_RuntimeError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    // ---- reception model -------------------------------------------------
    py::class_<CoefficientTable>(m, "CoefficientTable")
        .def_static("builtin", [] { return CoefficientTable::builtin(); })
        .def_static("from_file", &CoefficientTable::from_file, py::arg("path"))
        .def("at", &CoefficientTable::at, py::arg("i"), py::arg("j"), py::arg("k"))
        .def("checksum", &CoefficientTable::checksum)
        .def("__eq__",
             [](const CoefficientTable& a, const CoefficientTable& b) { return a == b; })
        .def("write_text", [](const CoefficientTable& t) {
            std::ostringstream out;
            t.write(out);
            return out.str();
        });

    py::class_<ReceptionDiagnostics>(m, "ReceptionDiagnostics")
        .def_readonly("clamped_high", &ReceptionDiagnostics::clamped_high)
        .def_readonly("clamped_low", &ReceptionDiagnostics::clamped_low)
        .def_readonly("xi_above_domain", &ReceptionDiagnostics::xi_above_domain)
        .def_readonly("x_beyond_range", &ReceptionDiagnostics::x_beyond_range)
        .def("total", &ReceptionDiagnostics::total);

    py::class_<DsrcParams>(m, "DsrcParams")
        .def(py::init<>())
        .def_readwrite("range_m", &DsrcParams::range_m)
        .def_readwrite("frequency_hz", &DsrcParams::frequency_hz);

    m.attr("MAX_COMMUNICATION_DENSITY") = kMaxCommunicationDensity;

    m.def("poly_h", &poly_h, py::arg("table"), py::arg("i"), py::arg("xi"), py::arg("phi_m"),
          "One of the four fitted polynomials of the reception model");
    m.def(
        "reception_probability",
        [](const CoefficientTable& t, double x, double xi, double phi) {
            return reception_probability(t, x, xi, phi);
        },
        py::arg("table"), py::arg("x_m"), py::arg("xi"), py::arg("phi_m"),
        "One-hop broadcast reception probability, clamped to [0,1]");
    m.def("reception_probability_raw", &reception_probability_raw, py::arg("table"),
          py::arg("x_m"), py::arg("xi"), py::arg("phi_m"));
    m.def("communication_density", &communication_density, py::arg("delta_veh_per_km"),
          py::arg("phi_m"), py::arg("f_hz"));

    // ---- stochastic channel ----------------------------------------------
    py::class_<Rng>(m, "Rng")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("uniform01", &Rng::uniform01);

    py::class_<BroadcastRoster>(m, "BroadcastRoster")
        .def(py::init<std::vector<double>>(), py::arg("positions_m"))
        .def("__len__", &BroadcastRoster::size);

    py::class_<ReceptionOutcome>(m, "ReceptionOutcome")
        .def_readonly("success", &ReceptionOutcome::success)
        .def_readonly("attempts_used", &ReceptionOutcome::attempts_used)
        .def_readonly("probability_used", &ReceptionOutcome::probability_used)
        .def("__repr__", [](const ReceptionOutcome& o) {
            std::ostringstream out;
            out << "ReceptionOutcome(success=" << (o.success ? "True" : "False")
                << ", attempts_used=" << o.attempts_used << ", probability_used="
                << o.probability_used << ")";
            return out.str();
        });

    m.def("local_broadcaster_density", &local_broadcaster_density, py::arg("receiver_pos_m"),
          py::arg("roster"), py::arg("phi_m"), py::arg("receiver_in_roster"));
    m.def("attempt_reception", &attempt_reception, py::arg("p"), py::arg("rng"));
    m.def(
        "run_constant_trial",
        [](double p, Rng& rng) {
            return run_reception_trial([p] { return p; }, rng);
        },
        py::arg("p"), py::arg("rng"),
        "Five-attempt transmission loop with a fixed per-attempt probability");
    m.def(
        "reception_trial",
        [](double receiver_pos, double x, const BroadcastRoster& roster, bool self_in_roster,
           const CoefficientTable& table, const DsrcParams& params, Rng& rng) {
            return reception_trial(receiver_pos, x, roster, self_in_roster, table, params, rng);
        },
        py::arg("receiver_pos_m"), py::arg("x_m"), py::arg("roster"),
        py::arg("receiver_in_roster"), py::arg("table"), py::arg("params"), py::arg("rng"));

    // ---- control ----------------------------------------------------------
    py::enum_<ControlMode>(m, "ControlMode")
        .value("HUMAN", ControlMode::Human)
        .value("ACC_FALLBACK", ControlMode::AccFallback)
        .value("CACC_PLATOONED", ControlMode::CaccPlatooned);

    py::enum_<FallbackEvent>(m, "FallbackEvent")
        .value("PACKET_DROP", FallbackEvent::PacketDrop)
        .value("INFEASIBLE_SOLUTION", FallbackEvent::InfeasibleSolution)
        .value("ODD_EXIT", FallbackEvent::OddExit)
        .value("ADS_FAILURE", FallbackEvent::AdsFailure);

    py::class_<ControllerParams>(m, "ControllerParams")
        .def(py::init<>())
        .def_readwrite("short_headway_s", &ControllerParams::short_headway_s)
        .def_readwrite("long_headway_s", &ControllerParams::long_headway_s)
        .def_readwrite("standstill_gap_m", &ControllerParams::standstill_gap_m)
        .def_readwrite("accel_max", &ControllerParams::accel_max)
        .def_readwrite("decel_max", &ControllerParams::decel_max)
        .def_readwrite("gap_gain", &ControllerParams::gap_gain)
        .def_readwrite("speed_gain", &ControllerParams::speed_gain)
        .def_readwrite("cruise_gain", &ControllerParams::cruise_gain)
        .def_readwrite("rejoin_threshold", &ControllerParams::rejoin_threshold)
        .def_readwrite("infeasible_factor", &ControllerParams::infeasible_factor);

    m.def("fallback_step", &fallback_step, py::arg("mode"), py::arg("event"),
          py::arg("consecutive_successes"), py::arg("params"),
          "One transition of the CACC fallback state machine");
    m.def("cacc_accel", &cacc_accel, py::arg("gap_m"), py::arg("speed"), py::arg("lead_speed"),
          py::arg("desired_speed"), py::arg("headway_s"), py::arg("params"));
    m.def("infeasibility_check", &infeasibility_check, py::arg("gap_m"), py::arg("speed"),
          py::arg("lead_speed"), py::arg("params"));

    py::class_<IdmParams>(m, "IdmParams")
        .def(py::init<>())
        .def_readwrite("time_headway_s", &IdmParams::time_headway_s)
        .def_readwrite("min_gap_m", &IdmParams::min_gap_m)
        .def_readwrite("accel_max", &IdmParams::accel_max)
        .def_readwrite("comfort_decel", &IdmParams::comfort_decel)
        .def_readwrite("emergency_decel", &IdmParams::emergency_decel);

    m.def("human_accel", &human_accel, py::arg("gap_m"), py::arg("speed"),
          py::arg("lead_speed"), py::arg("desired_speed"), py::arg("params"));

    // ---- scenarios ----------------------------------------------------------
    py::enum_<LanePolicy>(m, "LanePolicy")
        .value("BASE", LanePolicy::Base)
        .value("UML", LanePolicy::Uml)
        .value("MML", LanePolicy::Mml)
        .value("DL", LanePolicy::Dl)
        .value("DLA", LanePolicy::Dla);

    py::enum_<VehicleClass>(m, "VehicleClass")
        .value("GP_HUMAN", VehicleClass::GpHuman)
        .value("HOV_HUMAN", VehicleClass::HovHuman)
        .value("CACC", VehicleClass::Cacc);

    py::class_<DemandSpec>(m, "DemandSpec")
        .def(py::init<>())
        .def_readwrite("volume_vph", &DemandSpec::volume_vph)
        .def_readwrite("mpr", &DemandSpec::mpr)
        .def_readwrite("hov_fraction", &DemandSpec::hov_fraction)
        .def_readwrite("desired_speed_mean", &DemandSpec::desired_speed_mean)
        .def_readwrite("desired_speed_std", &DemandSpec::desired_speed_std);

    py::class_<RoadNetwork>(m, "RoadNetwork")
        .def(py::init<>())
        .def_readwrite("length_m", &RoadNetwork::length_m)
        .def_readwrite("lane_count", &RoadNetwork::lane_count)
        .def_readwrite("policy", &RoadNetwork::policy)
        .def("lane_allows", &RoadNetwork::lane_allows, py::arg("lane"), py::arg("klass"));

    py::class_<SampleStats>(m, "SampleStats")
        .def_readonly("n", &SampleStats::n)
        .def_readonly("mean", &SampleStats::mean)
        .def_readonly("median", &SampleStats::median)
        .def_readonly("variance", &SampleStats::variance)
        .def_readonly("q1", &SampleStats::q1)
        .def_readonly("q3", &SampleStats::q3)
        .def_readonly("min", &SampleStats::min)
        .def_readonly("max", &SampleStats::max);

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init<>())
        .def_readwrite("network", &ScenarioConfig::network)
        .def_readwrite("demand", &ScenarioConfig::demand)
        .def_readwrite("dsrc", &ScenarioConfig::dsrc)
        .def_readwrite("controller", &ScenarioConfig::controller)
        .def_readwrite("idm", &ScenarioConfig::idm)
        .def_readwrite("horizon_s", &ScenarioConfig::horizon_s)
        .def_readwrite("warmup_s", &ScenarioConfig::warmup_s)
        .def_readwrite("dt_s", &ScenarioConfig::dt_s)
        .def_readwrite("control_every", &ScenarioConfig::control_every)
        .def_readwrite("replications", &ScenarioConfig::replications)
        .def_readwrite("base_seed", &ScenarioConfig::base_seed)
        .def_readwrite("reception_override", &ScenarioConfig::reception_override)
        .def("validate", &ScenarioConfig::validate);

    m.def("load_scenario_file", &load_scenario_file, py::arg("path"));

    py::class_<ReplicationResult>(m, "ReplicationResult")
        .def_readonly("replication", &ReplicationResult::replication)
        .def_readonly("seed", &ReplicationResult::seed)
        .def_readonly("failed", &ReplicationResult::failed)
        .def_readonly("diagnostic", &ReplicationResult::diagnostic)
        .def_readonly("trials", &ReplicationResult::trials)
        .def_readonly("successes", &ReplicationResult::successes)
        .def_readonly("xi_samples", &ReplicationResult::xi_samples)
        .def_readonly("fallback_packet_drop", &ReplicationResult::fallback_packet_drop)
        .def_readonly("fallback_infeasible", &ReplicationResult::fallback_infeasible)
        .def_readonly("spawned", &ReplicationResult::spawned)
        .def_readonly("retired", &ReplicationResult::retired)
        .def_readonly("remaining", &ReplicationResult::remaining)
        .def_readonly("throughput_vph", &ReplicationResult::throughput_vph)
        .def_readonly("reception_diag", &ReplicationResult::reception_diag)
        .def_property_readonly("reception_rate", &ReplicationResult::reception_rate);

    py::class_<MetricsAggregate>(m, "MetricsAggregate")
        .def_readonly("replications_used", &MetricsAggregate::replications_used)
        .def_readonly("trials", &MetricsAggregate::trials)
        .def_readonly("successes", &MetricsAggregate::successes)
        .def_readonly("reception_rate", &MetricsAggregate::reception_rate)
        .def_readonly("xi", &MetricsAggregate::xi)
        .def_readonly("fallback_packet_drop", &MetricsAggregate::fallback_packet_drop)
        .def_readonly("fallback_infeasible", &MetricsAggregate::fallback_infeasible)
        .def_readonly("mean_throughput_vph", &MetricsAggregate::mean_throughput_vph);

    m.def(
        "run_replication",
        [](const ScenarioConfig& cfg, int replication) {
            py::gil_scoped_release release;
            return run_replication(cfg, replication);
        },
        py::arg("config"), py::arg("replication") = 0);
    m.def(
        "aggregate",
        [](const std::vector<ReplicationResult>& results) {
            return aggregate(std::span<const ReplicationResult>(results));
        },
        py::arg("results"));
    m.def("summarize", &summarize, py::arg("samples"));
}
