#include "oranfl/net_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oranfl/errors.hpp"

namespace oranfl {

const char* stage_kind_name(StageKind kind) {
    switch (kind) {
        case StageKind::ORu: return "O-RU";
        case StageKind::ODu: return "O-DU";
        case StageKind::OCu: return "O-CU";
    }
    return "?";
}

double Pathway::stage_latency_s() const {
    double total = 0.0;
    for (const auto& s : stages) total += s.latency_s;
    return total;
}

double shannon_rate(double bandwidth_hz, double snr_linear) {
    if (!(bandwidth_hz > 0.0)) {
        throw std::invalid_argument("shannon_rate: bandwidth must be positive");
    }
    if (snr_linear < 0.0) {
        throw std::invalid_argument("shannon_rate: snr must be nonnegative");
    }
    return bandwidth_hz * std::log2(1.0 + snr_linear);
}

double sample_snr(double mean_snr, Rng& rng) {
    if (!(mean_snr > 0.0)) {
        throw std::invalid_argument("sample_snr: mean_snr must be positive");
    }
    return rng.exponential(mean_snr);
}

double outage_probability(double mean_snr, double threshold) {
    if (!(mean_snr > 0.0) || !(threshold > 0.0)) {
        throw std::invalid_argument("outage_probability: arguments must be positive");
    }
    return -std::expm1(-threshold / mean_snr);
}

double transmission_time(double payload_bits, double rate_bps) {
    if (payload_bits < 0.0) {
        throw std::invalid_argument("transmission_time: payload must be nonnegative");
    }
    if (rate_bps < 0.0) {
        throw std::invalid_argument("transmission_time: rate must be nonnegative");
    }
    if (rate_bps == 0.0) {
        throw ZeroRateError("transmission_time: zero rate, caller must mark outage");
    }
    return payload_bits / rate_bps;
}

double round_energy(double tx_power_w, double tx_time_s, double compute_power_w,
                    double compute_time_s, double idle_power_w, double idle_time_s) {
    for (double v : {tx_power_w, tx_time_s, compute_power_w, compute_time_s,
                     idle_power_w, idle_time_s}) {
        if (v < 0.0) {
            throw std::invalid_argument("round_energy: arguments must be nonnegative");
        }
    }
    return tx_power_w * tx_time_s + compute_power_w * compute_time_s +
           idle_power_w * idle_time_s;
}

double pathway_latency(const Pathway& p, double payload_bits, double rate_bps) {
    const double effective_rate = std::min(rate_bps, p.capacity_bps);
    if (payload_bits == 0.0) {
        return p.stage_latency_s();
    }
    return p.stage_latency_s() + transmission_time(payload_bits, effective_rate);
}

}  // namespace oranfl
