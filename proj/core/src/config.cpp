#include "oranfl/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "oranfl/errors.hpp"

namespace oranfl {

ConfigError::ConfigError(const std::string& file, std::vector<ConfigViolation> violations)
    : std::runtime_error(render(file, violations)), violations_(std::move(violations)) {}

std::string ConfigError::render(const std::string& file,
                                const std::vector<ConfigViolation>& violations) {
    std::ostringstream out;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        const auto& v = violations[i];
        if (i) out << "\n";
        out << file << ":" << v.line << ": " << v.key << ": " << v.message;
    }
    return out.str();
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) {
        parts.push_back(trim(part));
    }
    return parts;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Parse context: accumulates values, per-key source lines, and violations.
struct Parser {
    std::string file;
    SimConfig cfg;
    std::map<std::string, int> key_lines;
    std::vector<ConfigViolation> errors;

    [[noreturn]] void fail(int line, const std::string& key, const std::string& msg) const {
        throw ConfigError(file, {{key, line, msg}});
    }

    double to_double(const std::string& v, int line, const std::string& key) const {
        char* end = nullptr;
        const double x = std::strtod(v.c_str(), &end);
        if (v.empty() || end != v.c_str() + v.size()) {
            fail(line, key, "expected a number, got '" + v + "'");
        }
        return x;
    }

    long long to_int(const std::string& v, int line, const std::string& key) const {
        char* end = nullptr;
        const long long x = std::strtoll(v.c_str(), &end, 10);
        if (v.empty() || end != v.c_str() + v.size()) {
            fail(line, key, "expected an integer, got '" + v + "'");
        }
        return x;
    }

    bool to_bool(const std::string& v, int line, const std::string& key) const {
        if (v == "true") return true;
        if (v == "false") return false;
        fail(line, key, "expected true or false, got '" + v + "'");
    }

    std::vector<double> to_double_list(const std::string& v, int line,
                                       const std::string& key) const {
        std::vector<double> out;
        for (const auto& part : split_list(v)) {
            out.push_back(to_double(part, line, key));
        }
        if (out.empty()) fail(line, key, "expected a comma-separated list");
        return out;
    }
};

enum class Section { None, Sim, Controller, Fl, Rat, Client, Pathway };

void apply_sim(Parser& p, const std::string& key, const std::string& value, int line) {
    auto& cfg = p.cfg;
    const std::string path = "sim." + key;
    if (key == "rounds") {
        cfg.rounds = static_cast<int>(p.to_int(value, line, path));
    } else if (key == "deadline_s") {
        cfg.deadline_s = p.to_double(value, line, path);
    } else if (key == "min_round_duration_s") {
        cfg.min_round_duration_s = p.to_double(value, line, path);
    } else if (key == "eps_out") {
        cfg.eps_out = p.to_double(value, line, path);
    } else if (key == "seeds") {
        cfg.seeds.clear();
        for (const auto& part : split_list(value)) {
            cfg.seeds.push_back(static_cast<std::uint64_t>(p.to_int(part, line, path)));
        }
    } else {
        p.fail(line, path, "unknown key");
    }
    p.key_lines[path] = line;
}

void apply_controller(Parser& p, const std::string& key, const std::string& value, int line) {
    auto& ct = p.cfg.controller;
    const std::string path = "controller." + key;
    if (key == "rapp_enabled") {
        ct.rapp_enabled = p.to_bool(value, line, path);
    } else if (key == "baseline_rat_id") {
        ct.baseline_rat_id = static_cast<int>(p.to_int(value, line, path));
    } else if (key == "rapp_period") {
        ct.rapp_period = static_cast<int>(p.to_int(value, line, path));
    } else if (key == "alpha") {
        ct.alpha = p.to_double(value, line, path);
    } else if (key == "gamma") {
        ct.gamma = p.to_double(value, line, path);
    } else if (key == "epsilon") {
        ct.epsilon = p.to_double(value, line, path);
    } else if (key == "epsilon_decay") {
        ct.epsilon_decay = p.to_double(value, line, path);
    } else if (key == "epsilon_min") {
        ct.epsilon_min = p.to_double(value, line, path);
    } else if (key == "w_energy") {
        ct.rewards.w_energy = p.to_double(value, line, path);
    } else if (key == "w_latency") {
        ct.rewards.w_latency = p.to_double(value, line, path);
    } else if (key == "qos_penalty") {
        ct.rewards.qos_penalty = p.to_double(value, line, path);
    } else if (key == "energy_norm_j") {
        ct.rewards.energy_norm_j = p.to_double(value, line, path);
    } else if (key == "latency_norm_s") {
        ct.rewards.latency_norm_s = p.to_double(value, line, path);
    } else if (key == "policy") {
        if (value == "proportional-fair") {
            ct.policy.kind = PolicyKind::ProportionalFair;
        } else if (value == "equal-share") {
            ct.policy.kind = PolicyKind::EqualShare;
        } else if (value == "greedy-rate") {
            ct.policy.kind = PolicyKind::GreedyRate;
        } else {
            p.fail(line, path,
                   "unknown policy '" + value +
                       "' (expected proportional-fair, equal-share, or greedy-rate)");
        }
    } else if (key == "latency_bucket_edges") {
        ct.latency_bucket_edges = p.to_double_list(value, line, path);
    } else if (key == "congestion_bucket_edges") {
        ct.congestion_bucket_edges = p.to_double_list(value, line, path);
    } else {
        p.fail(line, path, "unknown key");
    }
    p.key_lines[path] = line;
}

void apply_fl(Parser& p, const std::string& key, const std::string& value, int line) {
    auto& fl = p.cfg.fl;
    const std::string path = "fl." + key;
    if (key == "model") {
        if (value == "logistic") {
            fl.model = ModelKind::Logistic;
        } else if (value == "mlp") {
            fl.model = ModelKind::Mlp;
        } else {
            p.fail(line, path, "unknown model '" + value + "' (expected logistic or mlp)");
        }
    } else if (key == "hidden_units") {
        fl.hidden_units = static_cast<int>(p.to_int(value, line, path));
    } else if (key == "lr") {
        fl.lr = p.to_double(value, line, path);
    } else if (key == "epochs") {
        fl.epochs = static_cast<int>(p.to_int(value, line, path));
    } else if (key == "batch_size") {
        fl.batch_size = static_cast<int>(p.to_int(value, line, path));
    } else if (key == "strategy") {
        const auto kind = strategy_from_name(value);
        if (!kind) {
            p.fail(line, path,
                   "unknown strategy '" + value +
                       "' (expected fedora, fedavg-random, greedy, or loss-ranked)");
        }
        fl.strategy.kind = *kind;
    } else if (key == "fraction") {
        fl.strategy.fraction = p.to_double(value, line, path);
    } else if (key == "top_k") {
        fl.strategy.top_k = static_cast<int>(p.to_int(value, line, path));
    } else if (key == "dataset") {
        if (value == "blobs") {
            fl.dataset = DatasetKind::Blobs;
        } else if (value == "csv") {
            fl.dataset = DatasetKind::Csv;
        } else {
            p.fail(line, path, "unknown dataset '" + value + "' (expected blobs or csv)");
        }
    } else if (key == "n_features") {
        fl.n_features = static_cast<int>(p.to_int(value, line, path));
    } else if (key == "n_classes") {
        fl.n_classes = static_cast<int>(p.to_int(value, line, path));
    } else if (key == "test_samples") {
        fl.test_samples = static_cast<int>(p.to_int(value, line, path));
    } else if (key == "center_scale") {
        fl.center_scale = p.to_double(value, line, path);
    } else if (key == "noise_std") {
        fl.noise_std = p.to_double(value, line, path);
    } else if (key == "partition") {
        if (value == "iid") {
            fl.partition = PartitionKind::Iid;
        } else if (value == "dirichlet") {
            fl.partition = PartitionKind::Dirichlet;
        } else {
            p.fail(line, path, "unknown partition '" + value + "' (expected iid or dirichlet)");
        }
    } else if (key == "dirichlet_alpha") {
        fl.dirichlet_alpha = p.to_double(value, line, path);
    } else if (key == "csv_path") {
        fl.csv_path = value;
    } else if (key == "train_split") {
        fl.train_split = p.to_double(value, line, path);
    } else if (key == "init_scale") {
        fl.init_scale = p.to_double(value, line, path);
    } else {
        p.fail(line, path, "unknown key");
    }
    p.key_lines[path] = line;
}

void apply_rat(Parser& p, RatProfile& rat, int ordinal, const std::string& key,
               const std::string& value, int line) {
    const std::string path = "rat[" + std::to_string(ordinal) + "]." + key;
    if (key == "id") {
        rat.rat_id = static_cast<int>(p.to_int(value, line, path));
    } else if (key == "label") {
        rat.label = value;
    } else if (key == "prb_count") {
        rat.prb_count = static_cast<int>(p.to_int(value, line, path));
    } else if (key == "prb_bandwidth_hz") {
        rat.prb_bandwidth_hz = p.to_double(value, line, path);
    } else if (key == "base_latency_s") {
        rat.base_latency_s = p.to_double(value, line, path);
    } else if (key == "power_levels_w") {
        rat.power_levels_w = p.to_double_list(value, line, path);
    } else if (key == "idle_power_w") {
        rat.idle_power_w = p.to_double(value, line, path);
    } else if (key == "outage_snr_threshold") {
        rat.outage_snr_threshold = p.to_double(value, line, path);
    } else {
        p.fail(line, path, "unknown key");
    }
    p.key_lines[path] = line;
}

void apply_client(Parser& p, ClientNode& client, int ordinal, const std::string& key,
                  const std::string& value, int line) {
    const std::string path = "client[" + std::to_string(ordinal) + "]." + key;
    if (key == "id") {
        client.client_id = static_cast<int>(p.to_int(value, line, path));
    } else if (key == "mean_snr") {
        client.mean_snr.clear();
        for (const auto& part : split_list(value)) {
            const auto colon = part.find(':');
            if (colon == std::string::npos) {
                p.fail(line, path, "expected rat_id:snr pairs, got '" + part + "'");
            }
            const int rat_id =
                static_cast<int>(p.to_int(trim(part.substr(0, colon)), line, path));
            const double snr = p.to_double(trim(part.substr(colon + 1)), line, path);
            client.mean_snr[rat_id] = snr;
        }
    } else if (key == "dataset_size") {
        client.dataset_size = static_cast<int>(p.to_int(value, line, path));
    } else if (key == "compute_rate") {
        client.compute_rate = p.to_double(value, line, path);
    } else if (key == "compute_power_w") {
        client.compute_power_w = p.to_double(value, line, path);
    } else {
        p.fail(line, path, "unknown key");
    }
    p.key_lines[path] = line;
}

void apply_pathway(Parser& p, Pathway& pw, int ordinal, const std::string& key,
                   const std::string& value, int line) {
    const std::string path = "pathway[" + std::to_string(ordinal) + "]." + key;
    if (key == "id") {
        pw.pathway_id = static_cast<int>(p.to_int(value, line, path));
    } else if (key == "stages") {
        pw.stages.clear();
        for (const auto& part : split_list(value)) {
            const auto colon = part.find(':');
            if (colon == std::string::npos) {
                p.fail(line, path, "expected STAGE:latency pairs, got '" + part + "'");
            }
            const std::string label = trim(part.substr(0, colon));
            StageKind kind;
            if (label == "O-RU") {
                kind = StageKind::ORu;
            } else if (label == "O-DU") {
                kind = StageKind::ODu;
            } else if (label == "O-CU") {
                kind = StageKind::OCu;
            } else {
                p.fail(line, path,
                       "unknown stage '" + label + "' (expected O-RU, O-DU, or O-CU)");
            }
            pw.stages.push_back({kind, p.to_double(trim(part.substr(colon + 1)), line, path)});
        }
    } else if (key == "capacity_bps") {
        pw.capacity_bps = p.to_double(value, line, path);
    } else {
        p.fail(line, path, "unknown key");
    }
    p.key_lines[path] = line;
}

SimConfig parse_config_stream(std::istream& in, const std::string& name) {
    Parser p;
    p.file = name;
    p.cfg.rats.clear();
    p.cfg.pathways.clear();
    p.cfg.clients.clear();

    Section section = Section::None;
    bool seen_sim = false, seen_controller = false, seen_fl = false;
    bool rat_id_set = false, client_id_set = false, pathway_id_set = false;

    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        std::string line = raw;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') {
                p.fail(line_no, line, "malformed section header");
            }
            const std::string sec = trim(line.substr(1, line.size() - 2));
            if (sec == "sim") {
                if (seen_sim) p.fail(line_no, "sim", "duplicate [sim] section");
                seen_sim = true;
                section = Section::Sim;
            } else if (sec == "controller") {
                if (seen_controller) p.fail(line_no, "controller", "duplicate [controller] section");
                seen_controller = true;
                section = Section::Controller;
            } else if (sec == "fl") {
                if (seen_fl) p.fail(line_no, "fl", "duplicate [fl] section");
                seen_fl = true;
                section = Section::Fl;
            } else if (sec == "rat") {
                section = Section::Rat;
                RatProfile rat;
                rat.rat_id = static_cast<int>(p.cfg.rats.size());
                rat.label = "rat" + std::to_string(rat.rat_id);
                p.cfg.rats.push_back(rat);
                rat_id_set = false;
                p.key_lines["rat[" + std::to_string(p.cfg.rats.size() - 1) + "]"] = line_no;
            } else if (sec == "client") {
                section = Section::Client;
                ClientNode c;
                c.client_id = static_cast<int>(p.cfg.clients.size());
                p.cfg.clients.push_back(c);
                client_id_set = false;
                p.key_lines["client[" + std::to_string(p.cfg.clients.size() - 1) + "]"] = line_no;
            } else if (sec == "pathway") {
                section = Section::Pathway;
                Pathway pw;
                pw.pathway_id = static_cast<int>(p.cfg.pathways.size());
                p.cfg.pathways.push_back(pw);
                pathway_id_set = false;
                p.key_lines["pathway[" + std::to_string(p.cfg.pathways.size() - 1) + "]"] =
                    line_no;
            } else {
                p.fail(line_no, sec, "unknown section");
            }
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            p.fail(line_no, line, "expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) p.fail(line_no, line, "empty key");

        switch (section) {
            case Section::None:
                p.fail(line_no, key, "key outside any section");
            case Section::Sim:
                apply_sim(p, key, value, line_no);
                break;
            case Section::Controller:
                apply_controller(p, key, value, line_no);
                break;
            case Section::Fl:
                apply_fl(p, key, value, line_no);
                break;
            case Section::Rat:
                if (key == "id" && rat_id_set) {
                    p.fail(line_no, "rat.id", "duplicate id in block");
                }
                if (key == "id") rat_id_set = true;
                apply_rat(p, p.cfg.rats.back(), static_cast<int>(p.cfg.rats.size()) - 1, key,
                          value, line_no);
                break;
            case Section::Client:
                if (key == "id" && client_id_set) {
                    p.fail(line_no, "client.id", "duplicate id in block");
                }
                if (key == "id") client_id_set = true;
                apply_client(p, p.cfg.clients.back(), static_cast<int>(p.cfg.clients.size()) - 1,
                             key, value, line_no);
                break;
            case Section::Pathway:
                if (key == "id" && pathway_id_set) {
                    p.fail(line_no, "pathway.id", "duplicate id in block");
                }
                if (key == "id") pathway_id_set = true;
                apply_pathway(p, p.cfg.pathways.back(),
                              static_cast<int>(p.cfg.pathways.size()) - 1, key, value, line_no);
                break;
        }
    }

    // Defaulted mean_snr: every RAT at linear SNR 10.
    for (auto& c : p.cfg.clients) {
        if (c.mean_snr.empty()) {
            for (const auto& r : p.cfg.rats) c.mean_snr[r.rat_id] = 10.0;
        }
    }

    // Semantic validation; every violation is reported with its source line
    // (the block header when the key never appeared in the file).
    auto violations = validate_config(p.cfg);
    if (!violations.empty()) {
        for (auto& v : violations) {
            auto it = p.key_lines.find(v.key);
            if (it == p.key_lines.end()) {
                const auto dot = v.key.rfind('.');
                if (dot != std::string::npos) {
                    it = p.key_lines.find(v.key.substr(0, dot));
                }
            }
            if (it != p.key_lines.end()) v.line = it->second;
        }
        throw ConfigError(name, std::move(violations));
    }
    return p.cfg;
}

}  // namespace

SimConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string(), {{"", 0, "cannot open config file"}});
    }
    return parse_config_stream(in, path.string());
}

SimConfig parse_config_text(const std::string& text, const std::string& name) {
    std::istringstream in(text);
    return parse_config_stream(in, name);
}

std::string serialize_config(const SimConfig& cfg) {
    std::ostringstream out;
    out << "[sim]\n";
    out << "rounds = " << cfg.rounds << "\n";
    out << "deadline_s = " << fmt_double(cfg.deadline_s) << "\n";
    out << "min_round_duration_s = " << fmt_double(cfg.min_round_duration_s) << "\n";
    out << "eps_out = " << fmt_double(cfg.eps_out) << "\n";
    out << "seeds = ";
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
        if (i) out << ", ";
        out << cfg.seeds[i];
    }
    out << "\n\n";

    const auto& ct = cfg.controller;
    out << "[controller]\n";
    out << "rapp_enabled = " << (ct.rapp_enabled ? "true" : "false") << "\n";
    out << "baseline_rat_id = " << ct.baseline_rat_id << "\n";
    out << "rapp_period = " << ct.rapp_period << "\n";
    out << "alpha = " << fmt_double(ct.alpha) << "\n";
    out << "gamma = " << fmt_double(ct.gamma) << "\n";
    out << "epsilon = " << fmt_double(ct.epsilon) << "\n";
    out << "epsilon_decay = " << fmt_double(ct.epsilon_decay) << "\n";
    out << "epsilon_min = " << fmt_double(ct.epsilon_min) << "\n";
    out << "w_energy = " << fmt_double(ct.rewards.w_energy) << "\n";
    out << "w_latency = " << fmt_double(ct.rewards.w_latency) << "\n";
    out << "qos_penalty = " << fmt_double(ct.rewards.qos_penalty) << "\n";
    out << "energy_norm_j = " << fmt_double(ct.rewards.energy_norm_j) << "\n";
    out << "latency_norm_s = " << fmt_double(ct.rewards.latency_norm_s) << "\n";
    out << "policy = " << policy_kind_name(ct.policy.kind) << "\n";
    out << "latency_bucket_edges = ";
    for (std::size_t i = 0; i < ct.latency_bucket_edges.size(); ++i) {
        if (i) out << ", ";
        out << fmt_double(ct.latency_bucket_edges[i]);
    }
    out << "\n";
    out << "congestion_bucket_edges = ";
    for (std::size_t i = 0; i < ct.congestion_bucket_edges.size(); ++i) {
        if (i) out << ", ";
        out << fmt_double(ct.congestion_bucket_edges[i]);
    }
    out << "\n\n";

    const auto& fl = cfg.fl;
    out << "[fl]\n";
    out << "model = " << (fl.model == ModelKind::Logistic ? "logistic" : "mlp") << "\n";
    out << "hidden_units = " << fl.hidden_units << "\n";
    out << "lr = " << fmt_double(fl.lr) << "\n";
    out << "epochs = " << fl.epochs << "\n";
    out << "batch_size = " << fl.batch_size << "\n";
    out << "strategy = " << strategy_name(fl.strategy.kind) << "\n";
    out << "fraction = " << fmt_double(fl.strategy.fraction) << "\n";
    out << "top_k = " << fl.strategy.top_k << "\n";
    out << "dataset = " << (fl.dataset == DatasetKind::Blobs ? "blobs" : "csv") << "\n";
    out << "n_features = " << fl.n_features << "\n";
    out << "n_classes = " << fl.n_classes << "\n";
    out << "test_samples = " << fl.test_samples << "\n";
    out << "center_scale = " << fmt_double(fl.center_scale) << "\n";
    out << "noise_std = " << fmt_double(fl.noise_std) << "\n";
    out << "partition = " << (fl.partition == PartitionKind::Iid ? "iid" : "dirichlet") << "\n";
    out << "dirichlet_alpha = " << fmt_double(fl.dirichlet_alpha) << "\n";
    if (!fl.csv_path.empty()) {
        out << "csv_path = " << fl.csv_path << "\n";
    }
    out << "train_split = " << fmt_double(fl.train_split) << "\n";
    out << "init_scale = " << fmt_double(fl.init_scale) << "\n";

    for (const auto& rat : cfg.rats) {
        out << "\n[rat]\n";
        out << "id = " << rat.rat_id << "\n";
        out << "label = " << rat.label << "\n";
        out << "prb_count = " << rat.prb_count << "\n";
        out << "prb_bandwidth_hz = " << fmt_double(rat.prb_bandwidth_hz) << "\n";
        out << "base_latency_s = " << fmt_double(rat.base_latency_s) << "\n";
        out << "power_levels_w = ";
        for (std::size_t i = 0; i < rat.power_levels_w.size(); ++i) {
            if (i) out << ", ";
            out << fmt_double(rat.power_levels_w[i]);
        }
        out << "\n";
        out << "idle_power_w = " << fmt_double(rat.idle_power_w) << "\n";
        out << "outage_snr_threshold = " << fmt_double(rat.outage_snr_threshold) << "\n";
    }

    for (const auto& c : cfg.clients) {
        out << "\n[client]\n";
        out << "id = " << c.client_id << "\n";
        out << "mean_snr = ";
        bool first = true;
        for (const auto& [rat_id, snr] : c.mean_snr) {
            if (!first) out << ", ";
            first = false;
            out << rat_id << ":" << fmt_double(snr);
        }
        out << "\n";
        out << "dataset_size = " << c.dataset_size << "\n";
        out << "compute_rate = " << fmt_double(c.compute_rate) << "\n";
        out << "compute_power_w = " << fmt_double(c.compute_power_w) << "\n";
    }

    for (const auto& pw : cfg.pathways) {
        out << "\n[pathway]\n";
        out << "id = " << pw.pathway_id << "\n";
        out << "stages = ";
        for (std::size_t i = 0; i < pw.stages.size(); ++i) {
            if (i) out << ", ";
            out << stage_kind_name(pw.stages[i].kind) << ":" << fmt_double(pw.stages[i].latency_s);
        }
        out << "\n";
        out << "capacity_bps = " << fmt_double(pw.capacity_bps) << "\n";
    }
    return out.str();
}

}  // namespace oranfl
