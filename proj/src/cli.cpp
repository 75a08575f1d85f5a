#include "ltesim/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "ltesim/errors.hpp"

namespace ltesim::cli {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::size_t line)
{
    throw ParseError("invalid value '" + std::string(value) + "' for " + std::string(key) + " at line " +
                     std::to_string(line));
}

double to_double(std::string_view key, std::string_view v, std::size_t line)
{
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        bad_value(key, v, line);
    }
    return out;
}

std::int64_t to_int(std::string_view key, std::string_view v, std::size_t line)
{
    std::int64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        bad_value(key, v, line);
    }
    return out;
}

bool to_bool(std::string_view key, std::string_view v, std::size_t line)
{
    if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "off" || v == "0" || v == "no") return false;
    bad_value(key, v, line);
}

using Setter = std::function<void(engine::SimConfig&, std::string_view, std::size_t)>;

const std::map<std::string, Setter, std::less<>>& setters()
{
    using C = engine::SimConfig;
    static const std::map<std::string, Setter, std::less<>> table = [] {
        std::map<std::string, Setter, std::less<>> t;
        auto dbl = [&t](const char* key, double C::*field) {
            t[key] = [key, field](C& c, std::string_view v, std::size_t l) { c.*field = to_double(key, v, l); };
        };
        auto flag = [&t](const char* key, bool C::*field) {
            t[key] = [key, field](C& c, std::string_view v, std::size_t l) { c.*field = to_bool(key, v, l); };
        };
        dbl("duration_s", &C::duration_s);
        dbl("cell_radius_m", &C::cell_radius_m);
        dbl("ue_speed_kmph", &C::ue_speed_kmph);
        dbl("video_kbps", &C::video_kbps);
        dbl("video_fps", &C::video_fps);
        dbl("delay_budget_s", &C::delay_budget_s);
        dbl("pf_window_tti", &C::pf_window_ttis);
        dbl("rate_floor", &C::rate_floor);
        dbl("shadow_sigma_db", &C::shadow_sigma_db);
        dbl("tx_power_dbm", &C::tx_power_dbm);
        dbl("noise_figure_db", &C::noise_figure_db);
        dbl("turn_epoch_s", &C::turn_epoch_s);
        flag("video", &C::video_enabled);
        flag("voip", &C::voip_enabled);
        flag("best_effort", &C::best_effort_enabled);
        flag("fading", &C::fast_fading);
        flag("shadowing", &C::shadowing);
        flag("hex_layout", &C::hex_layout);

        t["bandwidth_mhz"] = [](C& c, std::string_view v, std::size_t l) {
            c.bandwidth_hz = to_double("bandwidth_mhz", v, l) * 1e6;
            radio::prb_count(c.bandwidth_hz);
        };
        t["n_ues"] = [](C& c, std::string_view v, std::size_t l) {
            c.n_ues = static_cast<int>(to_int("n_ues", v, l));
        };
        t["seed"] = [](C& c, std::string_view v, std::size_t l) {
            c.seed = static_cast<std::uint64_t>(to_int("seed", v, l));
        };
        t["video_frames"] = [](C& c, std::string_view v, std::size_t l) {
            c.video_frames = to_int("video_frames", v, l);
        };
        t["be_packet_bytes"] = [](C& c, std::string_view v, std::size_t l) {
            c.best_effort_packet_bytes = to_int("be_packet_bytes", v, l);
        };
        t["scheduler"] = [](C& c, std::string_view v, std::size_t) { c.scheduler = sched::parse_policy(v); };
        t["video_trace"] = [](C& c, std::string_view v, std::size_t) { c.video_trace_path = std::string(v); };
        t["voip_on_s"] = [](C& c, std::string_view v, std::size_t l) { c.voip.mean_on_s = to_double("voip_on_s", v, l); };
        t["voip_off_s"] = [](C& c, std::string_view v, std::size_t l) {
            c.voip.mean_off_s = to_double("voip_off_s", v, l);
        };
        t["voip_packet_bytes"] = [](C& c, std::string_view v, std::size_t l) {
            c.voip.packet_bytes = to_int("voip_packet_bytes", v, l);
        };
        t["voip_interval_s"] = [](C& c, std::string_view v, std::size_t l) {
            c.voip.packet_interval_s = to_double("voip_interval_s", v, l);
        };
        t["exp_variant"] = [](C& c, std::string_view v, std::size_t l) {
            if (v == "waiting") {
                c.exp.variant = sched::ExpVariant::waiting_time;
            } else if (v == "queue") {
                c.exp.variant = sched::ExpVariant::queue_length;
            } else {
                bad_value("exp_variant", v, l);
            }
        };
        t["exp_beta"] = [](C& c, std::string_view v, std::size_t l) { c.exp.beta = to_double("exp_beta", v, l); };
        t["exp_eta"] = [](C& c, std::string_view v, std::size_t l) { c.exp.eta = to_double("exp_eta", v, l); };
        t["exp_delay_weight"] = [](C& c, std::string_view v, std::size_t l) {
            c.exp.delay_weight = to_double("exp_delay_weight", v, l);
        };
        t["log_c"] = [](C& c, std::string_view v, std::size_t l) { c.log.c = to_double("log_c", v, l); };
        t["log_delay_weight"] = [](C& c, std::string_view v, std::size_t l) {
            c.log.delay_weight = to_double("log_delay_weight", v, l);
        };
        return t;
    }();
    return table;
}

}  // namespace

engine::SimConfig parse_config(std::string_view text)
{
    engine::SimConfig config;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("expected 'key = value' at line " + std::to_string(line_no));
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        const auto& table = setters();
        const auto it = table.find(key);
        if (it == table.end()) {
            throw ConfigError("unknown key '" + std::string(key) + "' at line " + std::to_string(line_no));
        }
        it->second(config, value, line_no);
    }
    config.validate();
    return config;
}

engine::SimConfig load_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config '" + path.string() + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::vector<metrics::KpiReport> run_sweep(const SweepSpec& spec, unsigned threads)
{
    if (spec.schedulers.empty()) {
        throw ConfigError("sweep needs at least one scheduler");
    }
    if (spec.ue_counts.empty()) {
        throw ConfigError("sweep needs at least one user count");
    }
    if (spec.seeds.empty()) {
        throw ConfigError("sweep needs at least one seed");
    }
    auto counts = spec.ue_counts;
    std::sort(counts.begin(), counts.end());
    counts.erase(std::unique(counts.begin(), counts.end()), counts.end());

    struct Job {
        engine::SimConfig config;
        metrics::KpiReport report;
    };
    std::vector<Job> jobs;
    for (const auto policy : spec.schedulers) {
        for (const int n : counts) {
            for (const auto seed : spec.seeds) {
                Job j{spec.base, {}};
                j.config.scheduler = policy;
                j.config.n_ues = n;
                j.config.seed = seed;
                j.config.validate();
                jobs.push_back(std::move(j));
            }
        }
    }

    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(jobs.size()));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                jobs[i].report = engine::run(jobs[i].config);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = jobs.size();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    std::vector<metrics::KpiReport> out;
    const std::size_t per_point = spec.seeds.size();
    for (std::size_t i = 0; i < jobs.size(); i += per_point) {
        std::vector<metrics::KpiReport> group;
        for (std::size_t k = 0; k < per_point; ++k) {
            group.push_back(jobs[i + k].report);
        }
        out.push_back(metrics::aggregate(group));
    }
    return out;
}

std::string format_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string results_csv(const std::vector<metrics::KpiReport>& reports)
{
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& r : reports) {
        for (const auto c : metrics::kKpiClasses) {
            const auto& k = r[c];
            out += r.scheduler + ',' + std::to_string(r.n_ues) + ',' + std::to_string(r.seed_count) + ',' +
                   std::string(metrics::to_string(c)) + ',' + format_number(k.throughput_bps) + ',' +
                   format_number(k.avg_delay_s) + ',' + format_number(k.plr) + ',' + format_number(k.fairness) +
                   ',' + format_number(k.spectral_efficiency) + '\n';
        }
    }
    return out;
}

std::vector<CsvRow> parse_results_csv(std::string_view text)
{
    std::vector<CsvRow> rows;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        const auto line = trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (line.empty()) {
            continue;
        }
        if (line_no == 1) {
            if (line != kCsvHeader) {
                throw ParseError("unexpected results.csv header");
            }
            continue;
        }
        std::vector<std::string_view> f;
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            f.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
            if (comma == std::string_view::npos) {
                break;
            }
            start = comma + 1;
        }
        if (f.size() != 9) {
            throw ParseError("expected 9 fields at line " + std::to_string(line_no));
        }
        auto num = [&](std::string_view v) {
            return std::strtod(std::string(v).c_str(), nullptr);
        };
        rows.push_back({std::string(f[0]), static_cast<int>(to_int("n_ues", f[1], line_no)),
                        static_cast<int>(to_int("seeds", f[2], line_no)), std::string(f[3]), num(f[4]), num(f[5]),
                        num(f[6]), num(f[7]), num(f[8])});
    }
    return rows;
}

std::string_view figure_file(Figure f)
{
    switch (f) {
        case Figure::throughput: return "fig_throughput.dat";
        case Figure::delay: return "fig_delay.dat";
        case Figure::plr: return "fig_plr.dat";
        case Figure::fairness: return "fig_fairness.dat";
        case Figure::speff: return "fig_speff.dat";
    }
    return "";
}

std::string figure_data(const std::vector<metrics::KpiReport>& reports, Figure f)
{
    std::vector<std::string> schedulers;
    std::vector<int> counts;
    for (const auto& r : reports) {
        if (std::find(schedulers.begin(), schedulers.end(), r.scheduler) == schedulers.end()) {
            schedulers.push_back(r.scheduler);
        }
        counts.push_back(r.n_ues);
    }
    std::sort(counts.begin(), counts.end());
    counts.erase(std::unique(counts.begin(), counts.end()), counts.end());

    auto value = [f](const metrics::KpiReport& r) {
        const auto& video = r[metrics::KpiClass::video];
        switch (f) {
            case Figure::throughput: return video.throughput_bps;
            case Figure::delay: return video.avg_delay_s;
            case Figure::plr: return video.plr;
            case Figure::fairness: return video.fairness;
            case Figure::speff: return r[metrics::KpiClass::all].spectral_efficiency;
        }
        return 0.0;
    };

    std::string out = "# n_ues";
    for (const auto& s : schedulers) {
        out += ' ' + s;
    }
    out += '\n';
    for (const int n : counts) {
        out += std::to_string(n);
        for (const auto& s : schedulers) {
            const auto it = std::find_if(reports.begin(), reports.end(),
                                         [&](const auto& r) { return r.scheduler == s && r.n_ues == n; });
            out += ' ' + (it == reports.end() ? std::string("nan") : format_number(value(*it)));
        }
        out += '\n';
    }
    return out;
}

std::vector<std::filesystem::path> write_outputs(const std::vector<metrics::KpiReport>& reports,
                                                 const std::filesystem::path& out_dir)
{
    if (reports.empty()) {
        throw ConfigError("no reports to write");
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory '" + out_dir.string() + "': " + ec.message());
    }
    std::vector<std::filesystem::path> written;
    auto emit = [&](const std::filesystem::path& path, const std::string& body) {
        std::ofstream out(path);
        out << body;
        out.close();
        if (!out) {
            throw std::runtime_error("cannot write '" + path.string() + "'");
        }
        written.push_back(path);
    };
    emit(out_dir / "results.csv", results_csv(reports));
    for (const auto f : kFigures) {
        emit(out_dir / figure_file(f), figure_data(reports, f));
    }
    return written;
}

}  // namespace ltesim::cli
