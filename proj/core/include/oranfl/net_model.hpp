#pragma once

#include <map>
#include <string>
#include <vector>

#include "oranfl/rng.hpp"

namespace oranfl {

// Static description of one radio access technology.
struct RatProfile {
    int rat_id = 0;
    std::string label;
    int prb_count = 24;                   // resource blocks per scheduling interval
    double prb_bandwidth_hz = 180e3;      // Hz per PRB
    double base_latency_s = 0.01;         // fixed access + fronthaul latency
    std::vector<double> power_levels_w = {0.5, 1.0, 2.0};   // strictly increasing
    double idle_power_w = 0.05;
    double outage_snr_threshold = 0.1;    // linear SNR below which decoding fails

    double max_power_w() const { return power_levels_w.back(); }

    bool operator==(const RatProfile&) const = default;
};

// One FL user device.
struct ClientNode {
    int client_id = 0;
    std::map<int, double> mean_snr;       // rat_id -> average linear SNR
    int dataset_size = 100;               // local samples
    double compute_rate = 2000.0;         // samples per second
    double compute_power_w = 0.5;

    bool operator==(const ClientNode&) const = default;
};

enum class StageKind { ORu, ODu, OCu };

const char* stage_kind_name(StageKind kind);

struct PathwayStage {
    StageKind kind = StageKind::ORu;
    double latency_s = 0.0;

    bool operator==(const PathwayStage&) const = default;
};

// One disaggregated route (O-RU / O-DU / O-CU stages) a model upload traverses.
struct Pathway {
    int pathway_id = 0;
    std::vector<PathwayStage> stages = {{StageKind::ORu, 0.001},
                                        {StageKind::ODu, 0.002},
                                        {StageKind::OCu, 0.001}};
    double capacity_bps = 1e9;            // aggregate backhaul capacity

    double stage_latency_s() const;

    bool operator==(const Pathway&) const = default;
};

// Instantaneous channel state for one client on one RAT.
struct LinkRealization {
    int client_id = 0;
    int rat_id = 0;
    double snr_linear = 0.0;              // sampled instantaneous SNR
    double tx_power_w = 0.0;
    int prbs_allocated = 0;
};

// Per-round KPIs for one client, as fed back to the rApp.
struct KpiReport {
    int round_index = 0;
    int client_id = 0;
    double latency_s = 0.0;
    double energy_j = 0.0;
    double rate_bps = 0.0;
    bool outage = false;
    bool qos_met = false;

    bool operator==(const KpiReport&) const = default;
};

// Shannon capacity over the given bandwidth; exactly 0 at snr = 0.
double shannon_rate(double bandwidth_hz, double snr_linear);

// Instantaneous SNR draw: exponential with the given mean (Rayleigh fading).
double sample_snr(double mean_snr, Rng& rng);

// Closed-form Rayleigh outage: P[snr < threshold] = 1 - exp(-threshold/mean).
double outage_probability(double mean_snr, double threshold);

// payload_bits / rate_bps. Throws ZeroRateError at rate 0; the caller marks
// the transfer as an outage instead.
double transmission_time(double payload_bits, double rate_bps);

// tx + compute + idle energy over one round, in joules.
double round_energy(double tx_power_w, double tx_time_s, double compute_power_w,
                    double compute_time_s, double idle_power_w, double idle_time_s);

// Total route delay: stage latencies plus transmission at the capacity-clamped
// rate.
double pathway_latency(const Pathway& p, double payload_bits, double rate_bps);

}  // namespace oranfl
