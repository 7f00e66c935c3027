#include "oranfl/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace oranfl {

namespace {

// Purpose tags for derived rng streams.
enum StreamTag : std::uint64_t {
    kRapp = 1,
    kSelect = 2,
    kTrain = 3,
    kChannel = 4,
    kData = 5,
    kTest = 6,
    kInit = 7,
    kSplit = 8,
    kPartition = 9,
};

int bucket_of(double value, std::span<const double> edges) {
    int b = 0;
    for (double e : edges) {
        if (value >= e) ++b;
    }
    return b;
}

}  // namespace

const char* drop_reason_name(DropReason r) {
    switch (r) {
        case DropReason::None: return "none";
        case DropReason::Outage: return "outage";
        case DropReason::Deadline: return "deadline";
        case DropReason::NotSelected: return "not-selected";
        case DropReason::Infeasible: return "infeasible";
    }
    return "?";
}

RicObservation make_observation(const std::optional<KpiReport>& prev_kpi,
                                std::span<const double> congestion,
                                std::span<const double> latency_edges,
                                std::span<const double> congestion_edges) {
    RicObservation obs;
    if (prev_kpi) {
        obs.latency_bucket = bucket_of(prev_kpi->latency_s, latency_edges);
        obs.outage_flag = prev_kpi->outage;
    }
    obs.congestion_bucket.reserve(congestion.size());
    for (double c : congestion) {
        obs.congestion_bucket.push_back(bucket_of(c, congestion_edges));
    }
    return obs;
}

std::vector<ConfigViolation> validate_config(const SimConfig& cfg) {
    std::vector<ConfigViolation> out;
    const auto bad = [&](const std::string& key, const std::string& msg) {
        out.push_back({key, 0, msg});
    };

    if (cfg.rounds < 1) bad("sim.rounds", "must be at least 1");
    if (!(cfg.deadline_s > 0.0)) bad("sim.deadline_s", "must be positive");
    if (cfg.min_round_duration_s < 0.0) bad("sim.min_round_duration_s", "must be nonnegative");
    if (!(cfg.eps_out > 0.0) || !(cfg.eps_out < 1.0)) bad("sim.eps_out", "must be in (0,1)");
    if (cfg.seeds.empty()) bad("sim.seeds", "at least one seed required");
    {
        std::set<std::uint64_t> seen(cfg.seeds.begin(), cfg.seeds.end());
        if (seen.size() != cfg.seeds.size()) bad("sim.seeds", "seeds must be unique");
    }

    if (cfg.rats.empty()) bad("rat", "at least one RAT required");
    std::set<int> rat_ids;
    double max_base_latency = 0.0;
    for (std::size_t i = 0; i < cfg.rats.size(); ++i) {
        const auto& r = cfg.rats[i];
        const std::string p = "rat[" + std::to_string(i) + "].";
        if (!rat_ids.insert(r.rat_id).second) bad(p + "id", "duplicate rat id");
        if (r.prb_count < 1) bad(p + "prb_count", "must be at least 1");
        if (!(r.prb_bandwidth_hz > 0.0)) bad(p + "prb_bandwidth_hz", "must be positive");
        if (r.base_latency_s < 0.0) bad(p + "base_latency_s", "must be nonnegative");
        max_base_latency = std::max(max_base_latency, r.base_latency_s);
        if (r.power_levels_w.empty()) {
            bad(p + "power_levels_w", "at least one power level required");
        } else {
            bool increasing = r.power_levels_w[0] > 0.0;
            for (std::size_t k = 1; k < r.power_levels_w.size(); ++k) {
                if (r.power_levels_w[k] <= r.power_levels_w[k - 1]) increasing = false;
            }
            if (!increasing) {
                bad(p + "power_levels_w", "values must be positive and strictly increasing");
            }
        }
        if (r.idle_power_w < 0.0) bad(p + "idle_power_w", "must be nonnegative");
        if (!(r.outage_snr_threshold > 0.0)) bad(p + "outage_snr_threshold", "must be positive");
    }
    if (!cfg.rats.empty() && !(cfg.deadline_s > max_base_latency)) {
        bad("sim.deadline_s", "must exceed every RAT base latency");
    }

    if (cfg.pathways.empty()) bad("pathway", "at least one pathway required");
    std::set<int> pathway_ids;
    for (std::size_t i = 0; i < cfg.pathways.size(); ++i) {
        const auto& pw = cfg.pathways[i];
        const std::string p = "pathway[" + std::to_string(i) + "].";
        if (!pathway_ids.insert(pw.pathway_id).second) bad(p + "id", "duplicate pathway id");
        if (pw.stages.empty()) bad(p + "stages", "at least one stage required");
        for (const auto& s : pw.stages) {
            if (s.latency_s < 0.0) {
                bad(p + "stages", "stage latency must be nonnegative");
                break;
            }
        }
        if (!(pw.capacity_bps > 0.0)) bad(p + "capacity_bps", "must be positive");
    }

    if (cfg.clients.size() < 2) bad("client", "at least two clients required");
    std::set<int> client_ids;
    for (std::size_t i = 0; i < cfg.clients.size(); ++i) {
        const auto& c = cfg.clients[i];
        const std::string p = "client[" + std::to_string(i) + "].";
        if (!client_ids.insert(c.client_id).second) bad(p + "id", "duplicate client id");
        for (const auto& r : cfg.rats) {
            auto it = c.mean_snr.find(r.rat_id);
            if (it == c.mean_snr.end()) {
                bad(p + "mean_snr", "missing entry for rat " + std::to_string(r.rat_id));
            } else if (!(it->second > 0.0)) {
                bad(p + "mean_snr", "entry for rat " + std::to_string(r.rat_id) +
                                        " must be positive");
            }
        }
        for (const auto& [rat_id, snr] : c.mean_snr) {
            if (!rat_ids.count(rat_id)) {
                bad(p + "mean_snr", "entry for unknown rat " + std::to_string(rat_id));
            }
        }
        if (c.dataset_size < 1) bad(p + "dataset_size", "must be at least 1");
        if (!(c.compute_rate > 0.0)) bad(p + "compute_rate", "must be positive");
        if (!(c.compute_power_w > 0.0)) bad(p + "compute_power_w", "must be positive");
    }

    const auto& ct = cfg.controller;
    if (!(ct.alpha > 0.0) || ct.alpha > 1.0) bad("controller.alpha", "must be in (0,1]");
    if (ct.gamma < 0.0 || ct.gamma >= 1.0) bad("controller.gamma", "must be in [0,1)");
    if (ct.epsilon < 0.0 || ct.epsilon > 1.0) bad("controller.epsilon", "must be in [0,1]");
    if (!(ct.epsilon_decay > 0.0) || ct.epsilon_decay > 1.0) {
        bad("controller.epsilon_decay", "must be in (0,1]");
    }
    if (ct.epsilon_min < 0.0 || ct.epsilon_min > 1.0) {
        bad("controller.epsilon_min", "must be in [0,1]");
    }
    if (ct.rapp_period < 1) bad("controller.rapp_period", "must be at least 1");
    if (!rat_ids.empty() && !rat_ids.count(ct.baseline_rat_id)) {
        bad("controller.baseline_rat_id", "unknown rat id");
    }
    if (ct.rewards.w_energy < 0.0) bad("controller.w_energy", "must be nonnegative");
    if (ct.rewards.w_latency < 0.0) bad("controller.w_latency", "must be nonnegative");
    if (!(ct.rewards.w_energy + ct.rewards.w_latency > 0.0)) {
        bad("controller.w_energy", "w_energy + w_latency must be positive");
    }
    if (ct.rewards.qos_penalty < 0.0) bad("controller.qos_penalty", "must be nonnegative");
    if (!(ct.rewards.energy_norm_j > 0.0)) bad("controller.energy_norm_j", "must be positive");
    if (!(ct.rewards.latency_norm_s > 0.0)) bad("controller.latency_norm_s", "must be positive");
    const auto check_edges = [&](const std::vector<double>& edges, const std::string& key) {
        if (edges.empty()) bad(key, "at least one bucket edge required");
        for (std::size_t k = 1; k < edges.size(); ++k) {
            if (edges[k] <= edges[k - 1]) {
                bad(key, "edges must be strictly increasing");
                break;
            }
        }
    };
    check_edges(ct.latency_bucket_edges, "controller.latency_bucket_edges");
    check_edges(ct.congestion_bucket_edges, "controller.congestion_bucket_edges");

    const auto& fl = cfg.fl;
    if (fl.model == ModelKind::Mlp && fl.hidden_units < 1) {
        bad("fl.hidden_units", "mlp model needs at least one hidden unit");
    }
    if (!(fl.lr > 0.0)) bad("fl.lr", "must be positive");
    if (fl.epochs < 1) bad("fl.epochs", "must be at least 1");
    if (fl.batch_size < 1) bad("fl.batch_size", "must be at least 1");
    if (!(fl.strategy.fraction > 0.0) || fl.strategy.fraction > 1.0) {
        bad("fl.fraction", "must be in (0,1]");
    }
    if (fl.strategy.top_k < 1) bad("fl.top_k", "must be at least 1");
    if (fl.n_features < 1) bad("fl.n_features", "must be at least 1");
    if (fl.n_classes < 2) bad("fl.n_classes", "must be at least 2");
    if (fl.test_samples < 1) bad("fl.test_samples", "must be at least 1");
    if (!(fl.noise_std > 0.0)) bad("fl.noise_std", "must be positive");
    if (fl.center_scale < 0.0) bad("fl.center_scale", "must be nonnegative");
    if (!(fl.dirichlet_alpha > 0.0)) bad("fl.dirichlet_alpha", "must be positive");
    if (fl.dataset == DatasetKind::Csv && fl.csv_path.empty()) {
        bad("fl.csv_path", "required when dataset = csv");
    }
    if (!(fl.train_split > 0.0) || !(fl.train_split < 1.0)) {
        bad("fl.train_split", "must be in (0,1)");
    }
    if (fl.init_scale < 0.0) bad("fl.init_scale", "must be nonnegative");

    return out;
}

void require_valid(const SimConfig& cfg) {
    const auto violations = validate_config(cfg);
    if (violations.empty()) return;
    std::ostringstream msg;
    msg << "invalid config:";
    for (const auto& v : violations) {
        msg << "\n  " << v.key << ": " << v.message;
    }
    throw std::invalid_argument(msg.str());
}

// ---------------------------------------------------------------------------
// Simulation engine
// ---------------------------------------------------------------------------

struct Simulation::Impl {
    SimConfig cfg;
    std::uint64_t seed;

    ModelShape shape;
    std::vector<ClientNode> clients;      // ascending client_id
    std::vector<RatProfile> rats;         // ascending rat_id
    std::map<int, int> rat_pos;           // rat_id -> index into rats
    std::map<int, int> pathway_pos;       // pathway_id -> index into cfg.pathways
    std::vector<Action> actions;          // lexicographic (rat_id, power_level_index)
    ObservationSpace obs_space;
    QTable q;
    ModelParams global;
    std::vector<LocalDataset> shards;     // by client position
    LocalDataset test;

    int round = 0;
    std::vector<std::optional<KpiReport>> prev_kpi;   // by client position
    std::vector<double> prev_congestion;              // by rat position
    // Last rApp decision, reused between acting rounds when rapp_period > 1.
    std::vector<Action> candidate;
    std::vector<std::optional<Action>> guarded;
    std::vector<std::uint64_t> obs_state;
    std::map<int, LossHistory> history;

    Impl(const SimConfig& config, std::uint64_t seed);
    RoundTrace run_round();

    double payload_bits() const { return 32.0 * shape.dim(); }
    const RatProfile& rat_of(const Action& a) const { return rats[rat_pos.at(a.rat_id)]; }
    int action_index(const Action& a) const;
};

namespace {

std::vector<Action> build_action_set(const std::vector<RatProfile>& rats,
                                     const ControllerConfig& ct) {
    std::vector<Action> actions;
    if (ct.rapp_enabled) {
        for (const auto& r : rats) {
            for (int p = 0; p < static_cast<int>(r.power_levels_w.size()); ++p) {
                actions.push_back({r.rat_id, p});
            }
        }
    } else {
        // Fixed-regime baseline: single action, baseline RAT at max power.
        for (const auto& r : rats) {
            if (r.rat_id == ct.baseline_rat_id) {
                actions.push_back({r.rat_id, static_cast<int>(r.power_levels_w.size()) - 1});
            }
        }
    }
    std::sort(actions.begin(), actions.end());
    return actions;
}

}  // namespace

Simulation::Impl::Impl(const SimConfig& config, std::uint64_t seed_in)
    : cfg(config),
      seed(seed_in),
      shape{config.fl.n_features, config.fl.n_classes,
            config.fl.model == ModelKind::Mlp ? config.fl.hidden_units : 0},
      clients(config.clients),
      rats(config.rats),
      actions(),
      obs_space(),
      q(1, 0.1, 0.9, 0.0, 1.0) {
    require_valid(cfg);

    std::sort(clients.begin(), clients.end(),
              [](const ClientNode& a, const ClientNode& b) { return a.client_id < b.client_id; });
    std::sort(rats.begin(), rats.end(),
              [](const RatProfile& a, const RatProfile& b) { return a.rat_id < b.rat_id; });
    for (std::size_t i = 0; i < rats.size(); ++i) rat_pos[rats[i].rat_id] = static_cast<int>(i);
    for (std::size_t i = 0; i < cfg.pathways.size(); ++i) {
        pathway_pos[cfg.pathways[i].pathway_id] = static_cast<int>(i);
    }

    actions = build_action_set(rats, cfg.controller);
    obs_space = ObservationSpace{
        static_cast<int>(cfg.controller.latency_bucket_edges.size()) + 1,
        static_cast<int>(cfg.controller.congestion_bucket_edges.size()) + 1,
        static_cast<int>(rats.size())};
    q = QTable(static_cast<std::uint32_t>(actions.size()), cfg.controller.alpha,
               cfg.controller.gamma, cfg.controller.epsilon, cfg.controller.epsilon_decay,
               cfg.controller.epsilon_min);

    // Datasets. Blobs are drawn around per-seed class centers; CSV input is
    // split and partitioned with seed-derived streams. Either way the data
    // depends only on (config, seed), never on the strategy.
    const int n = static_cast<int>(clients.size());
    if (cfg.fl.dataset == DatasetKind::Blobs) {
        const BlobSpec spec{cfg.fl.n_classes, cfg.fl.n_features, cfg.fl.center_scale,
                            cfg.fl.noise_std};
        Rng data_rng = Rng::stream(seed, kData);
        const auto centers = make_blob_centers(spec, data_rng);
        const std::vector<double> uniform(cfg.fl.n_classes, 1.0 / cfg.fl.n_classes);
        shards.reserve(n);
        for (int i = 0; i < n; ++i) {
            Rng client_rng = Rng::stream(seed, kData, 1 + static_cast<std::uint64_t>(
                                                              clients[i].client_id));
            std::vector<double> probs = uniform;
            if (cfg.fl.partition == PartitionKind::Dirichlet) {
                probs = client_rng.dirichlet(cfg.fl.dirichlet_alpha, cfg.fl.n_classes);
            }
            shards.push_back(
                sample_blobs(spec, centers, probs, clients[i].dataset_size, client_rng));
        }
        Rng test_rng = Rng::stream(seed, kTest);
        test = sample_blobs(spec, centers, uniform, cfg.fl.test_samples, test_rng);
    } else {
        const LocalDataset pooled = load_csv(cfg.fl.csv_path);
        if (shape.n_features != pooled.n_features) {
            shape.n_features = pooled.n_features;
        }
        int n_classes = 0;
        for (int l : pooled.labels) n_classes = std::max(n_classes, l + 1);
        shape.n_classes = std::max(shape.n_classes, n_classes);
        Rng split_rng = Rng::stream(seed, kSplit);
        auto [train, test_part] = train_test_split(pooled, cfg.fl.train_split, split_rng);
        Rng part_rng = Rng::stream(seed, kPartition);
        shards = partition_dataset(train, n, cfg.fl.partition, cfg.fl.dirichlet_alpha, part_rng);
        test = std::move(test_part);
        for (int i = 0; i < n; ++i) {
            clients[i].dataset_size = shards[i].n_samples();
        }
    }

    Rng init_rng = Rng::stream(seed, kInit);
    global = init_params(shape, cfg.fl.init_scale, init_rng);

    prev_kpi.assign(n, std::nullopt);
    prev_congestion.assign(rats.size(), 0.0);
    candidate.assign(n, actions.front());
    guarded.assign(n, std::nullopt);
    obs_state.assign(n, 0);
}

int Simulation::Impl::action_index(const Action& a) const {
    const auto it = std::lower_bound(actions.begin(), actions.end(), a);
    return static_cast<int>(it - actions.begin());
}

RoundTrace Simulation::Impl::run_round() {
    const int r = round;
    const int n = static_cast<int>(clients.size());
    const auto& ct = cfg.controller;
    const double payload = payload_bits();

    RoundTrace trace;
    trace.round_index = r;
    trace.clients.assign(n, ClientRound{});

    // (1) rApp: observe previous KPIs, pick (RAT, power), run the outage
    // guard. Between acting rounds the previous decisions stay in force.
    const bool acting = (r % ct.rapp_period) == 0;
    if (acting) {
        Rng rapp_rng = Rng::stream(seed, kRapp, static_cast<std::uint64_t>(r));
        for (int i = 0; i < n; ++i) {
            const RicObservation obs =
                make_observation(prev_kpi[i], prev_congestion, ct.latency_bucket_edges,
                                 ct.congestion_bucket_edges);
            obs_state[i] = obs_space.encode(obs);
            candidate[i] = select_action(q, obs_state[i], actions, rapp_rng);
            guarded[i] = outage_guard(candidate[i], clients[i], rat_of(candidate[i]),
                                      cfg.eps_out);
        }
    }
    for (int i = 0; i < n; ++i) {
        auto& cr = trace.clients[i];
        cr.action = guarded[i].value_or(candidate[i]);
        cr.action_emitted = guarded[i].has_value();
        cr.kpi.round_index = r;
        cr.kpi.client_id = clients[i].client_id;
        if (guarded[i]) {
            // Selected transmit power of the action in force (energy actually
            // spent is tracked separately).
            cr.tx_power_w = rat_of(cr.action).power_levels_w[cr.action.power_level_index];
        } else {
            cr.drop = DropReason::Infeasible;
        }
    }

    // (2) FL client selection over the non-infeasible set.
    std::vector<int> eligible;
    for (int i = 0; i < n; ++i) {
        if (guarded[i]) eligible.push_back(clients[i].client_id);
    }
    std::vector<int> selected;
    if (!eligible.empty()) {
        Rng select_rng = Rng::stream(seed, kSelect, static_cast<std::uint64_t>(r));
        selected = select_clients(cfg.fl.strategy, history, eligible, select_rng);
    }
    std::set<int> selected_set(selected.begin(), selected.end());
    std::map<int, int> pos_of_id;
    for (int i = 0; i < n; ++i) pos_of_id[clients[i].client_id] = i;
    for (int i = 0; i < n; ++i) {
        if (guarded[i] && !selected_set.count(clients[i].client_id)) {
            trace.clients[i].drop = DropReason::NotSelected;
        }
    }

    // (3) Local training for the selected clients (independent rng streams,
    // so the loop order cannot change results).
    std::map<int, ClientUpdate> updates;       // client_id -> update
    std::map<int, double> compute_time;        // client_id -> seconds
    for (int id : selected) {
        const int i = pos_of_id[id];
        Rng train_rng = Rng::stream(seed, kTrain, static_cast<std::uint64_t>(r),
                                    static_cast<std::uint64_t>(id));
        auto [params, loss] = local_train(shape, global, shards[i], cfg.fl.epochs, cfg.fl.lr,
                                          cfg.fl.batch_size, train_rng);
        updates[id] = ClientUpdate{id, std::move(params), shards[i].n_samples(), loss};
        compute_time[id] =
            static_cast<double>(cfg.fl.epochs) * shards[i].n_samples() / clients[i].compute_rate;
    }

    // (4) xApp: per-RAT PRB allocation over that RAT's selected clients, then
    // pathway selection per client. Expected spectral efficiency comes from
    // the guarded action's effective mean SNR.
    std::vector<double> congestion_now(rats.size(), 0.0);
    std::map<int, int> prbs_of;      // client_id -> granted PRBs
    std::map<int, int> pathway_of;   // client_id -> pathway id
    for (std::size_t rp = 0; rp < rats.size(); ++rp) {
        const RatProfile& rat = rats[rp];
        std::vector<RatClient> group;
        for (int id : selected) {
            const int i = pos_of_id[id];
            const Action a = *guarded[i];
            if (a.rat_id != rat.rat_id) continue;
            const double eff = effective_mean_snr(clients[i], rat, a.power_level_index);
            group.push_back({id, std::log2(1.0 + eff)});
        }
        congestion_now[rp] =
            static_cast<double>(group.size()) / static_cast<double>(rat.prb_count);
        if (group.empty()) continue;

        // Proportional-fair admits at most prb_count clients; excess clients
        // are deferred to the next round (lowest ids keep their grant).
        if (cfg.controller.policy.kind == PolicyKind::ProportionalFair &&
            static_cast<int>(group.size()) > rat.prb_count) {
            std::sort(group.begin(), group.end(),
                      [](const RatClient& a, const RatClient& b) {
                          return a.client_id < b.client_id;
                      });
            for (std::size_t k = rat.prb_count; k < group.size(); ++k) {
                trace.clients[pos_of_id[group[k].client_id]].drop = DropReason::NotSelected;
            }
            group.resize(rat.prb_count);
        }

        const auto allocation = allocate_prbs(cfg.controller.policy, group, rat);
        for (const auto& [id, prbs] : allocation) {
            prbs_of[id] = prbs;
            if (prbs > 0) {
                const int i = pos_of_id[id];
                const double se =
                    std::log2(1.0 + effective_mean_snr(clients[i], rat,
                                                       guarded[i]->power_level_index));
                const double expected_rate = prbs * rat.prb_bandwidth_hz * se;
                pathway_of[id] = select_pathway(cfg.pathways, payload, expected_rate);
            }
        }
    }

    // (5) Physics: sample the channel, apply outage and deadline checks.
    // (6) Energy: droppees still pay compute and transmit energy up to the
    //     point where they gave up; idle power accrues while waiting for the
    //     round to finish.
    struct Activity {
        double tx_time = 0.0;        // charged radio-on seconds
        double tx_power = 0.0;
        double compute = 0.0;
    };
    std::vector<Activity> act(n);
    for (int i = 0; i < n; ++i) {
        auto& cr = trace.clients[i];
        const int id = clients[i].client_id;
        if (cr.drop == DropReason::Infeasible) continue;
        if (cr.drop == DropReason::NotSelected) {
            // Deferred clients that already trained keep their compute time.
            if (compute_time.count(id)) act[i].compute = compute_time[id];
            continue;
        }

        const RatProfile& rat = rat_of(*guarded[i]);
        const double tx_power = rat.power_levels_w[guarded[i]->power_level_index];
        act[i].compute = compute_time[id];
        cr.prbs = prbs_of.count(id) ? prbs_of[id] : 0;

        if (cr.prbs == 0) {
            // No grant this round: the upload can never finish. No radio time
            // is spent either (the grant never arrives).
            cr.drop = DropReason::Deadline;
            cr.kpi.latency_s = cfg.deadline_s;
            continue;
        }

        cr.pathway_id = pathway_of[id];
        const Pathway& pw = cfg.pathways[pathway_pos.at(cr.pathway_id)];

        Rng chan_rng = Rng::stream(seed, kChannel, static_cast<std::uint64_t>(r),
                                   static_cast<std::uint64_t>(id));
        const double eff_mean =
            effective_mean_snr(clients[i], rat, guarded[i]->power_level_index);
        const double snr = sample_snr(eff_mean, chan_rng);
        const double rate_phy = shannon_rate(cr.prbs * rat.prb_bandwidth_hz, snr);
        const double eff_rate = std::min(rate_phy, pw.capacity_bps);

        if (snr < rat.outage_snr_threshold) {
            // Decode failure. The client keeps the channel busy until it has
            // pushed the payload at the achieved rate or hits the deadline.
            cr.drop = DropReason::Outage;
            cr.kpi.outage = true;
            cr.kpi.rate_bps = 0.0;
            cr.kpi.latency_s = cfg.deadline_s;
            const double attempted =
                eff_rate > 0.0 ? payload / eff_rate : std::numeric_limits<double>::infinity();
            act[i].tx_time = std::min(attempted, cfg.deadline_s);
            act[i].tx_power = tx_power;
            continue;
        }

        const double latency = rat.base_latency_s + pathway_latency(pw, payload, rate_phy);
        const double tx_time = transmission_time(payload, eff_rate);
        cr.kpi.rate_bps = eff_rate;
        act[i].tx_power = tx_power;
        if (latency > cfg.deadline_s) {
            cr.drop = DropReason::Deadline;
            cr.kpi.latency_s = latency;
            act[i].tx_time = std::min(tx_time, cfg.deadline_s);
        } else {
            cr.included = true;
            cr.kpi.latency_s = latency;
            cr.kpi.qos_met = true;
            act[i].tx_time = tx_time;
        }
    }

    // Round wall-clock: slowest included client, floored at the configured
    // minimum duration.
    double wall = cfg.min_round_duration_s;
    for (int i = 0; i < n; ++i) {
        if (trace.clients[i].included) {
            wall = std::max(wall, act[i].compute + trace.clients[i].kpi.latency_s);
        }
    }
    trace.wall_clock_s = wall;

    for (int i = 0; i < n; ++i) {
        auto& cr = trace.clients[i];
        const RatProfile& rat = rat_of(cr.action);
        const double idle_time = std::max(0.0, wall - act[i].compute - act[i].tx_time);
        cr.kpi.energy_j = round_energy(act[i].tx_power, act[i].tx_time,
                                       clients[i].compute_power_w, act[i].compute,
                                       rat.idle_power_w, idle_time);
        trace.energy_j += cr.kpi.energy_j;
    }

    // (7) Aggregate delivered updates; an empty round carries the model over.
    std::vector<ClientUpdate> delivered;
    for (int i = 0; i < n; ++i) {
        if (trace.clients[i].included) {
            delivered.push_back(updates[clients[i].client_id]);
        }
    }
    if (!delivered.empty()) {
        global = fedavg_aggregate(delivered);
        for (const auto& u : delivered) {
            history[u.client_id].record(u.local_loss);
        }
    }

    // (8) Evaluate the global model.
    const EvalResult ev = evaluate(shape, global, test);
    trace.accuracy = ev.accuracy;
    trace.loss = ev.loss;

    // (9) Q-updates from this round's rewards; the next observation is the
    // one the rApp will actually see next round.
    if (acting) {
        for (int i = 0; i < n; ++i) {
            const auto& cr = trace.clients[i];
            const RicObservation next_obs =
                make_observation(cr.kpi, congestion_now, ct.latency_bucket_edges,
                                 ct.congestion_bucket_edges);
            const double rwd = reward(cr.kpi, ct.rewards);
            const Action learned = guarded[i].value_or(candidate[i]);
            q_update(q, obs_state[i], static_cast<std::uint32_t>(action_index(learned)), rwd,
                     obs_space.encode(next_obs));
        }
    }
    q.decay_epsilon();

    for (int i = 0; i < n; ++i) prev_kpi[i] = trace.clients[i].kpi;
    prev_congestion = congestion_now;
    ++round;
    return trace;
}

Simulation::Simulation(const SimConfig& cfg, std::uint64_t seed)
    : impl_(std::make_unique<Impl>(cfg, seed)) {}
Simulation::~Simulation() = default;
Simulation::Simulation(Simulation&&) noexcept = default;
Simulation& Simulation::operator=(Simulation&&) noexcept = default;

RoundTrace Simulation::run_round() { return impl_->run_round(); }
int Simulation::round() const { return impl_->round; }
const std::vector<Action>& Simulation::action_set() const { return impl_->actions; }
const ModelParams& Simulation::global_params() const { return impl_->global; }
const QTable& Simulation::qtable() const { return impl_->q; }
const LocalDataset& Simulation::test_set() const { return impl_->test; }
const std::vector<LocalDataset>& Simulation::shards() const { return impl_->shards; }
const ModelShape& Simulation::model_shape() const { return impl_->shape; }

ExperimentResult run_experiment(const SimConfig& cfg) {
    require_valid(cfg);

    std::vector<std::uint64_t> seeds = cfg.seeds;
    std::sort(seeds.begin(), seeds.end());   // reports merge in ascending seed order

    ExperimentResult result;
    std::int64_t delivered = 0;
    double total_energy = 0.0;
    double total_wall = 0.0;

    for (std::uint64_t seed : seeds) {
        Simulation sim(cfg, seed);
        SeedRun run;
        run.seed = seed;
        run.rounds.reserve(cfg.rounds);
        for (int r = 0; r < cfg.rounds; ++r) {
            run.rounds.push_back(sim.run_round());
        }
        const RoundTrace& last = run.rounds.back();
        result.report.per_seed.push_back({seed, last.accuracy, last.loss});
        for (const auto& rt : run.rounds) {
            total_energy += rt.energy_j;
            total_wall += rt.wall_clock_s;
            for (const auto& cr : rt.clients) {
                if (cr.included) ++delivered;
            }
        }
        result.runs.push_back(std::move(run));
    }

    // Welford accumulation; the acceptance suite cross-checks it against an
    // independent two-pass oracle.
    double mean_acc = 0.0, m2_acc = 0.0, mean_loss = 0.0;
    int count = 0;
    for (const auto& s : result.report.per_seed) {
        ++count;
        const double d = s.final_accuracy - mean_acc;
        mean_acc += d / count;
        m2_acc += d * (s.final_accuracy - mean_acc);
        mean_loss += (s.final_loss - mean_loss) / count;
    }
    auto& rep = result.report;
    rep.mean_accuracy = mean_acc;
    rep.accuracy_stddev = count > 1 ? std::sqrt(m2_acc / (count - 1)) : 0.0;
    rep.mean_loss = mean_loss;

    const std::int64_t slots = static_cast<std::int64_t>(seeds.size()) * cfg.rounds *
                               static_cast<std::int64_t>(cfg.clients.size());
    rep.qos_satisfaction_rate = static_cast<double>(delivered) / static_cast<double>(slots);
    rep.total_energy_j = total_energy;
    rep.total_wall_clock_s = total_wall;
    // Average device power: every client lives through every round's
    // wall-clock, so device-time is clients x wall-clock.
    const double device_time = static_cast<double>(cfg.clients.size()) * total_wall;
    rep.avg_power_w = device_time > 0.0 ? total_energy / device_time : 0.0;
    return result;
}

}  // namespace oranfl
