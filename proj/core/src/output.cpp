#include "oranfl/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace oranfl {

std::string format_g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

double round6(double v) {
    return std::strtod(format_g6(v).c_str(), nullptr);
}

namespace {

struct CurveRow {
    std::string strategy;
    std::uint64_t seed = 0;
    int round = 0;
    double accuracy = 0.0;
    double loss = 0.0;
    double energy_j = 0.0;
    double wall_clock_s = 0.0;
};

struct TraceRow {
    int round = 0;
    int client_id = 0;
    std::string strategy;
    int rat_id = 0;
    double power_w = 0.0;
    int prbs = 0;
    int pathway_id = -1;
    double rate_bps = 0.0;
    double latency_s = 0.0;
    double energy_j = 0.0;
    int outage = 0;
    int qos_met = 0;
    std::string drop_reason;
    int included = 0;
};

struct SummaryRow {
    std::string strategy;
    double accuracy = 0.0;
    double loss = 0.0;
    double acc_stddev = 0.0;
    double qos_rate = 0.0;
    double avg_power_w = 0.0;
};

constexpr const char* kTraceHeader =
    "round,client_id,strategy,rat_id,power_w,prbs,pathway_id,rate_bps,latency_s,"
    "energy_j,outage,qos_met,drop_reason,included";
constexpr const char* kCurveHeader =
    "strategy,seed,round,accuracy,loss,round_energy_j,round_wall_clock_s";

// Summary semantics shared by the writer and the verifier: aggregate over the
// 6-significant-digit values that live in the CSV files, so recomputation
// from the files reproduces the table exactly.
SummaryRow compute_summary(const std::string& strategy, std::span<const CurveRow> curves,
                           std::span<const TraceRow> traces, int n_clients) {
    SummaryRow row;
    row.strategy = strategy;

    // Final round per seed, ascending seed order.
    std::map<std::uint64_t, CurveRow> finals;
    double energy_sum = 0.0;
    double wall_sum = 0.0;
    for (const auto& c : curves) {
        if (c.strategy != strategy) continue;
        auto it = finals.find(c.seed);
        if (it == finals.end() || c.round > it->second.round) {
            finals[c.seed] = c;
        }
        energy_sum += c.energy_j;
        wall_sum += c.wall_clock_s;
    }
    if (finals.empty()) {
        throw std::runtime_error("no curve rows for strategy " + strategy);
    }
    const int n = static_cast<int>(finals.size());
    double acc_sum = 0.0, loss_sum = 0.0;
    for (const auto& [seed, f] : finals) {
        acc_sum += f.accuracy;
        loss_sum += f.loss;
    }
    row.accuracy = acc_sum / n;
    row.loss = loss_sum / n;
    double sq = 0.0;
    for (const auto& [seed, f] : finals) {
        const double d = f.accuracy - row.accuracy;
        sq += d * d;
    }
    row.acc_stddev = n > 1 ? std::sqrt(sq / (n - 1)) : 0.0;

    std::int64_t rows = 0, qos = 0;
    for (const auto& t : traces) {
        if (t.strategy != strategy) continue;
        ++rows;
        if (t.qos_met) ++qos;
    }
    row.qos_rate = rows > 0 ? static_cast<double>(qos) / static_cast<double>(rows) : 0.0;

    const double device_time = static_cast<double>(n_clients) * wall_sum;
    row.avg_power_w = device_time > 0.0 ? energy_sum / device_time : 0.0;
    return row;
}

void atomic_write(const std::filesystem::path& target, const std::string& content) {
    const std::filesystem::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out << content;
    }
    std::filesystem::rename(tmp, target);
}

std::string render_summary(std::span<const SummaryRow> rows) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof(line), "%-16s %-12s %-12s %-12s %-12s %-12s\n", "strategy",
                  "accuracy", "loss", "acc_stddev", "qos_rate", "avg_power_w");
    out << line;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof(line), "%-16s %-12s %-12s %-12s %-12s %-12s\n",
                      r.strategy.c_str(), format_g6(r.accuracy).c_str(),
                      format_g6(r.loss).c_str(), format_g6(r.acc_stddev).c_str(),
                      format_g6(r.qos_rate).c_str(), format_g6(r.avg_power_w).c_str());
        out << line;
    }
    return out.str();
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                               const std::string& expected_header) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line != expected_header) {
        throw std::runtime_error(path.string() + ": unexpected header");
    }
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        rows.push_back(split_csv(line));
    }
    return rows;
}

}  // namespace

void write_output_bundle(const std::filesystem::path& out_dir, const SimConfig& cfg,
                         std::span<const StrategyOutcome> outcomes) {
    std::filesystem::create_directories(out_dir);

    // Everything below works on rounded values only; the CSVs are the source
    // of truth for the summary.
    std::vector<CurveRow> curves;
    std::map<std::uint64_t, std::vector<TraceRow>> traces_by_seed;

    std::vector<const StrategyOutcome*> ordered;
    for (const auto& o : outcomes) ordered.push_back(&o);
    std::sort(ordered.begin(), ordered.end(),
              [](const StrategyOutcome* a, const StrategyOutcome* b) {
                  return a->strategy < b->strategy;
              });

    for (const StrategyOutcome* o : ordered) {
        for (const auto& run : o->result.runs) {
            for (const auto& rt : run.rounds) {
                curves.push_back({o->strategy, run.seed, rt.round_index, round6(rt.accuracy),
                                  round6(rt.loss), round6(rt.energy_j),
                                  round6(rt.wall_clock_s)});
                for (const auto& cr : rt.clients) {
                    TraceRow t;
                    t.round = rt.round_index;
                    t.client_id = cr.kpi.client_id;
                    t.strategy = o->strategy;
                    t.rat_id = cr.action.rat_id;
                    t.power_w = round6(cr.tx_power_w);
                    t.prbs = cr.prbs;
                    t.pathway_id = cr.pathway_id;
                    t.rate_bps = round6(cr.kpi.rate_bps);
                    t.latency_s = round6(cr.kpi.latency_s);
                    t.energy_j = round6(cr.kpi.energy_j);
                    t.outage = cr.kpi.outage ? 1 : 0;
                    t.qos_met = cr.kpi.qos_met ? 1 : 0;
                    t.drop_reason = drop_reason_name(cr.drop);
                    t.included = cr.included ? 1 : 0;
                    traces_by_seed[run.seed].push_back(t);
                }
            }
        }
    }

    // curves.csv: strategy asc, seed asc, round asc.
    std::sort(curves.begin(), curves.end(), [](const CurveRow& a, const CurveRow& b) {
        if (a.strategy != b.strategy) return a.strategy < b.strategy;
        if (a.seed != b.seed) return a.seed < b.seed;
        return a.round < b.round;
    });
    {
        std::ostringstream out;
        out << kCurveHeader << "\n";
        for (const auto& c : curves) {
            out << c.strategy << "," << c.seed << "," << c.round << ","
                << format_g6(c.accuracy) << "," << format_g6(c.loss) << ","
                << format_g6(c.energy_j) << "," << format_g6(c.wall_clock_s) << "\n";
        }
        atomic_write(out_dir / "curves.csv", out.str());
    }

    // trace_seed<seed>.csv: round asc, client_id asc, strategy asc.
    std::vector<TraceRow> all_traces;
    for (auto& [seed, rows] : traces_by_seed) {
        std::sort(rows.begin(), rows.end(), [](const TraceRow& a, const TraceRow& b) {
            if (a.round != b.round) return a.round < b.round;
            if (a.client_id != b.client_id) return a.client_id < b.client_id;
            return a.strategy < b.strategy;
        });
        std::ostringstream out;
        out << kTraceHeader << "\n";
        for (const auto& t : rows) {
            out << t.round << "," << t.client_id << "," << t.strategy << "," << t.rat_id << ","
                << format_g6(t.power_w) << "," << t.prbs << "," << t.pathway_id << ","
                << format_g6(t.rate_bps) << "," << format_g6(t.latency_s) << ","
                << format_g6(t.energy_j) << "," << t.outage << "," << t.qos_met << ","
                << t.drop_reason << "," << t.included << "\n";
        }
        atomic_write(out_dir / ("trace_seed" + std::to_string(seed) + ".csv"), out.str());
        all_traces.insert(all_traces.end(), rows.begin(), rows.end());
    }

    std::vector<SummaryRow> summary;
    for (const StrategyOutcome* o : ordered) {
        summary.push_back(compute_summary(o->strategy, curves, all_traces,
                                          static_cast<int>(cfg.clients.size())));
    }
    atomic_write(out_dir / "summary.txt", render_summary(summary));
}

VerifyResult verify_output_dir(const std::filesystem::path& out_dir) {
    VerifyResult result;
    const auto mismatch = [&](const std::string& msg) {
        result.ok = false;
        result.mismatches.push_back(msg);
    };

    std::vector<CurveRow> curves;
    std::set<std::string> strategies;
    std::set<std::uint64_t> seeds;
    try {
        for (const auto& cells : read_csv(out_dir / "curves.csv", kCurveHeader)) {
            if (cells.size() != 7) {
                throw std::runtime_error("curves.csv: bad column count");
            }
            CurveRow c;
            c.strategy = cells[0];
            c.seed = std::strtoull(cells[1].c_str(), nullptr, 10);
            c.round = std::atoi(cells[2].c_str());
            c.accuracy = std::strtod(cells[3].c_str(), nullptr);
            c.loss = std::strtod(cells[4].c_str(), nullptr);
            c.energy_j = std::strtod(cells[5].c_str(), nullptr);
            c.wall_clock_s = std::strtod(cells[6].c_str(), nullptr);
            curves.push_back(c);
            strategies.insert(c.strategy);
            seeds.insert(c.seed);
        }
    } catch (const std::exception& e) {
        mismatch(e.what());
        return result;
    }

    std::vector<TraceRow> traces;
    int n_clients = 0;
    try {
        for (std::uint64_t seed : seeds) {
            const auto path = out_dir / ("trace_seed" + std::to_string(seed) + ".csv");
            std::set<int> clients_seen;
            for (const auto& cells : read_csv(path, kTraceHeader)) {
                if (cells.size() != 14) {
                    throw std::runtime_error(path.string() + ": bad column count");
                }
                TraceRow t;
                t.round = std::atoi(cells[0].c_str());
                t.client_id = std::atoi(cells[1].c_str());
                t.strategy = cells[2];
                t.qos_met = std::atoi(cells[11].c_str());
                traces.push_back(t);
                clients_seen.insert(t.client_id);
            }
            n_clients = std::max(n_clients, static_cast<int>(clients_seen.size()));
        }
    } catch (const std::exception& e) {
        mismatch(e.what());
        return result;
    }

    std::vector<SummaryRow> expected;
    for (const auto& s : strategies) {
        try {
            expected.push_back(compute_summary(s, curves, traces, n_clients));
        } catch (const std::exception& e) {
            mismatch(e.what());
            return result;
        }
    }
    const std::string expected_text = render_summary(expected);

    std::ifstream in(out_dir / "summary.txt");
    if (!in) {
        mismatch("cannot open summary.txt");
        return result;
    }
    std::stringstream actual;
    actual << in.rdbuf();
    if (actual.str() != expected_text) {
        // Pin down the differing fields for the report.
        std::istringstream a(actual.str()), b(expected_text);
        std::string la, lb;
        int line_no = 0;
        while (std::getline(b, lb)) {
            ++line_no;
            if (!std::getline(a, la)) {
                mismatch("summary.txt: missing line " + std::to_string(line_no) + ": " + lb);
                continue;
            }
            if (la != lb) {
                mismatch("summary.txt line " + std::to_string(line_no) + ": found '" + la +
                         "', recomputed '" + lb + "'");
            }
        }
        while (std::getline(a, la)) {
            mismatch("summary.txt: unexpected extra line: " + la);
        }
        if (result.ok) {
            mismatch("summary.txt differs from recomputation");
        }
    }
    return result;
}

}  // namespace oranfl
