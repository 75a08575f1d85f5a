// Acceptance suite: reproduces the scheduler comparison at desk scale and
// checks the run invariants. One PASS/FAIL line per criterion; exit status is
// nonzero if any criterion fails.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "ltesim/engine.hpp"
#include "ltesim/metrics.hpp"
#include "ltesim/radio.hpp"
#include "ltesim/sched.hpp"
#include "support/oracle.hpp"

using namespace ltesim;
using metrics::KpiClass;
using metrics::KpiReport;
using sched::Policy;

namespace {

constexpr double kDuration = 20.0;
constexpr int kCounts[] = {10, 30, 50};
constexpr Policy kPolicies[] = {Policy::fls, Policy::exp, Policy::log};
constexpr std::uint64_t kSeeds[] = {1, 2, 3, 4, 5};

struct Job {
    engine::SimConfig config;
    engine::RunOutcome first;
    engine::RunOutcome second;
};

int failures = 0;

void verdict(int id, const std::string& name, bool ok, const std::string& detail)
{
    std::printf("[%s] %d %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b, double c)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// Every run twice, so determinism is checked on the same set.
std::vector<Job> run_all()
{
    std::vector<Job> jobs;
    for (auto p : kPolicies) {
        for (int n : kCounts) {
            for (auto seed : kSeeds) {
                engine::SimConfig c;
                c.duration_s = kDuration;
                c.scheduler = p;
                c.n_ues = n;
                c.seed = seed;
                jobs.push_back({c, {}, {}});
            }
        }
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            jobs[i].first = engine::simulate(jobs[i].config);
            jobs[i].second = engine::simulate(jobs[i].config);
        }
    };
    const unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }
    return jobs;
}

std::map<std::pair<Policy, int>, KpiReport> aggregate(const std::vector<Job>& jobs)
{
    std::map<std::pair<Policy, int>, std::vector<KpiReport>> groups;
    for (const auto& j : jobs) {
        groups[{j.config.scheduler, j.config.n_ues}].push_back(j.first.report);
    }
    std::map<std::pair<Policy, int>, KpiReport> out;
    for (const auto& [key, reports] : groups) out[key] = metrics::aggregate(reports);
    return out;
}

bool scale_invariance(std::string& detail)
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.01, 10.0), w(0.0, 0.1);
    int mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 6);
        std::vector<double> mu(n), avg(n), hol(n), a(n, 60.0);
        for (std::size_t i = 0; i < n; ++i) {
            mu[i] = u(rng);
            avg[i] = u(rng);
            hol[i] = w(rng);
        }
        const double mean = sched::exp_mean_term(a, hol);
        for (double k : {0.5, 8.0, 4096.0}) {
            auto pick = [&](auto metric) {
                std::size_t best = 0, best_k = 0;
                double m0 = metric(0, 1.0), mk0 = metric(0, k);
                for (std::size_t i = 1; i < n; ++i) {
                    const double m = metric(i, 1.0), mk = metric(i, k);
                    if (m > m0) best = i, m0 = m;
                    if (mk > mk0) best_k = i, mk0 = mk;
                }
                return best == best_k;
            };
            mismatches += !pick([&](std::size_t i, double s) { return sched::pf_metric(mu[i], avg[i] / s, 0.0); });
            mismatches += !pick([&](std::size_t i, double s) {
                return sched::exp_rule_metric(s / avg[i], mu[i], a[i], hol[i], mean, 0.5, 0.5);
            });
            mismatches += !pick([&](std::size_t i, double s) {
                return sched::log_rule_metric(s / avg[i], mu[i], 1.1, 50.0, hol[i]);
            });
        }
    }
    detail += "metric scale mismatches=" + std::to_string(mismatches);
    return mismatches == 0;
}

bool oracle_equivalence(std::string& detail)
{
    std::mt19937_64 rng(4242);
    std::vector<std::pair<std::string, sched::SchedulerParams>> configs;
    for (auto p : {Policy::pf, Policy::exp, Policy::log, Policy::fls}) {
        sched::SchedulerParams s;
        s.policy = p;
        configs.emplace_back(std::string(sched::to_string(p)), s);
    }
    sched::SchedulerParams q;
    q.policy = Policy::exp;
    q.exp.variant = sched::ExpVariant::queue_length;
    configs.emplace_back("EXP-Q", q);

    bool ok = true;
    for (const auto& [name, params] : configs) {
        int mismatches = 0;
        for (int trial = 0; trial < 1000; ++trial) {
            const auto inst = oracle::random_instance(rng);
            sched::FlsState fls;
            for (std::size_t i = 0; i < inst.flows.size(); ++i) {
                fls.at(inst.flows[i].flow_id).residual_quota = inst.quota[i];
            }
            const auto got = sched::allocate_subframe(inst.flows, params, inst.n_prb, &fls);
            const auto want = oracle::brute_force_allocate(inst.flows, params, inst.n_prb, inst.quota);
            bool same = got.prbs.size() == want.prb_flow.size();
            for (std::size_t k = 0; same && k < got.prbs.size(); ++k) {
                const auto g = got.prbs[k] ? std::optional<std::uint32_t>(got.prbs[k]->flow_id) : std::nullopt;
                same = g == want.prb_flow[k];
            }
            mismatches += !same;
        }
        detail += name + "=" + std::to_string(mismatches) + "/1000 ";
        ok = ok && mismatches == 0;
    }
    return ok;
}

}  // namespace

int main()
{
    std::printf("running %zu simulations (x2 for determinism), %.0f s each\n",
                std::size(kPolicies) * std::size(kCounts) * std::size(kSeeds), kDuration);
    std::fflush(stdout);
    const auto jobs = run_all();
    const auto agg = aggregate(jobs);
    auto at = [&](Policy p, int n) -> const KpiReport& { return agg.at({p, n}); };

    std::printf("%-4s %4s %12s %10s %8s %8s %8s\n", "sch", "ues", "video_bps", "delay_s", "plr", "jain",
                "speff");
    for (auto p : kPolicies) {
        for (int n : kCounts) {
            const auto& r = at(p, n);
            const auto& v = r[KpiClass::video];
            std::printf("%-4s %4d %12.0f %10.5f %8.4f %8.4f %8.4f\n", r.scheduler.c_str(), n, v.throughput_bps,
                        v.avg_delay_s, v.plr, v.fairness, r[KpiClass::all].spectral_efficiency);
        }
    }

    {
        const double f = at(Policy::fls, 50)[KpiClass::video].throughput_bps;
        const double e = at(Policy::exp, 50)[KpiClass::video].throughput_bps;
        const double l = at(Policy::log, 50)[KpiClass::video].throughput_bps;
        verdict(1, "throughput ordering at 50 UEs", f >= e && e >= l && f > l,
                fmt("FLS=%.0f EXP=%.0f LOG=%.0f bps", f, e, l));
    }
    {
        bool ok = true;
        std::string detail;
        for (auto p : kPolicies) {
            double prev = INFINITY;
            detail += std::string(sched::to_string(p)) + ":";
            for (int n : kCounts) {
                const double per_ue = at(p, n)[KpiClass::video].throughput_bps / n;
                ok = ok && per_ue < prev;
                prev = per_ue;
                detail += " " + std::to_string(static_cast<long>(per_ue));
            }
            detail += "  ";
        }
        verdict(2, "per-UE throughput decreases with load", ok, detail);
    }
    {
        const double f = at(Policy::fls, 50)[KpiClass::video].avg_delay_s;
        const double e = at(Policy::exp, 50)[KpiClass::video].avg_delay_s;
        const double l = at(Policy::log, 50)[KpiClass::video].avg_delay_s;
        const double gap = std::abs(e - l) / ((e + l) / 2.0);
        verdict(3, "delay ordering at 50 UEs", f <= e && f <= l && gap <= 0.30,
                fmt("FLS=%.5f EXP=%.5f LOG=%.5f s", f, e, l) + fmt(" |EXP-LOG|/mean=%.3f", gap, 0, 0));
    }
    {
        const double f = at(Policy::fls, 50)[KpiClass::video].plr;
        const double e = at(Policy::exp, 50)[KpiClass::video].plr;
        const double l = at(Policy::log, 50)[KpiClass::video].plr;
        const double f10 = at(Policy::fls, 10)[KpiClass::video].plr;
        const double f30 = at(Policy::fls, 30)[KpiClass::video].plr;
        verdict(4, "PLR ordering and FLS loss target", f <= e && e <= l && f10 < 0.01 && f30 < 0.01,
                fmt("50 UEs FLS=%.4f EXP=%.4f LOG=%.4f", f, e, l) +
                    fmt("; FLS@10=%.4f FLS@30=%.4f (target < 0.01)", f10, f30, 0));
    }
    {
        bool ok = true;
        std::string detail;
        for (int n : kCounts) {
            double lo = INFINITY, hi = -INFINITY;
            for (auto p : kPolicies) {
                const double j = at(p, n)[KpiClass::video].fairness;
                lo = std::min(lo, j);
                hi = std::max(hi, j);
            }
            ok = ok && hi - lo <= 0.15;
            detail += fmt("%.0f UEs: %.3f  ", n, hi - lo, 0);
        }
        verdict(5, "fairness band (max pairwise Jain gap <= 0.15)", ok, detail);
    }
    {
        bool ok = true;
        std::string detail;
        for (int n : kCounts) {
            double worst = 0.0;
            for (auto p : kPolicies) {
                for (auto q : kPolicies) {
                    const double a = at(p, n)[KpiClass::all].spectral_efficiency;
                    const double b = at(q, n)[KpiClass::all].spectral_efficiency;
                    worst = std::max(worst, std::abs(a - b) / ((a + b) / 2.0));
                }
            }
            ok = ok && worst <= 0.20;
            detail += fmt("%.0f UEs: %.3f  ", n, worst, 0);
        }
        verdict(6, "spectral-efficiency band (max relative gap <= 20%)", ok, detail);
    }
    {
        std::int64_t violations = 0, nondeterministic = 0, jain_out = 0, late = 0, quota = 0, conserve = 0,
                     prb = 0;
        for (const auto& j : jobs) {
            const auto& d = j.first.diagnostics;
            violations += d.violations();
            late += d.late_deliveries;
            quota += d.quota_violations;
            conserve += d.conservation_violations;
            prb += d.prb_conflicts;
            nondeterministic += !(j.first.report == j.second.report && j.first.diagnostics == j.second.diagnostics);
            for (const auto& f : j.first.flows) {
                const auto& c = f.counters;
                conserve += c.arrived_bits != c.delivered_bits + c.dropped_bits + f.queued_bits;
                late += f.delay_budget_s != traffic::kInfiniteBudget && c.max_delay_s > f.delay_budget_s + 1e-9;
            }
            for (auto k : metrics::kKpiClasses) {
                const double jn = j.first.report[k].fairness;
                jain_out += jn < 1.0 / j.config.n_ues - 1e-12 || jn > 1.0 + 1e-12;
            }
        }
        std::string detail = "runs=" + std::to_string(jobs.size()) + " violations=" + std::to_string(violations) +
                             " conservation=" + std::to_string(conserve) + " prb=" + std::to_string(prb) +
                             " late=" + std::to_string(late) + " quota=" + std::to_string(quota) +
                             " jain=" + std::to_string(jain_out) + " nondeterministic=" +
                             std::to_string(nondeterministic) + " ";
        const bool scale_ok = scale_invariance(detail);
        verdict(7, "invariant suite",
                violations == 0 && conserve == 0 && prb == 0 && late == 0 && quota == 0 && jain_out == 0 &&
                    nondeterministic == 0 && scale_ok,
                detail);
    }
    {
        std::string detail;
        const bool ok = oracle_equivalence(detail);
        verdict(8, "oracle equivalence", ok, detail);
    }
    {
        const auto tbs = radio::transport_block_bits(15, 50);
        const std::vector<double> jx{2.0, 4.0};
        const double jain = metrics::jain_index(jx);

        const std::vector<double> a{1.0, 1.0}, q{10.0, 0.0};
        const double mean = sched::exp_mean_term(a, q);
        const double e1 = sched::exp_rule_metric(1.0, 1.0, 1.0, 10.0, mean, 0.5, 0.5);
        const double e2 = sched::exp_rule_metric(1.0, 2.0, 1.0, 0.0, mean, 0.5, 0.5);

        const double l1 = sched::log_rule_metric(1.0, 2.0, 1.1, 1.0, 0.0);
        const double l2 = sched::log_rule_metric(1.0, 1.0, 1.1, 1.0, 5.0);

        sched::FlsFlowState st{0.0, 0.0, 0.5};
        const double u1 = sched::fls_quota_update(st, 100.0);
        const double u2 = sched::fls_quota_update(st, 100.0);

        const bool ok = tbs == 33328 && std::abs(jain - 0.9) < 1e-12 && e1 > e2 && l2 > l1 && u1 == 50.0 &&
                        u2 == 75.0;
        char buf[256];
        std::snprintf(buf, sizeof buf, "TBS=%lld jain=%.12g EXP=(%.4f, %.4f) LOG=(%.4f, %.4f) FLS=(%g, %g)",
                      static_cast<long long>(tbs), jain, e1, e2, l1, l2, u1, u2);
        verdict(9, "unit-level numeric checks", ok, buf);
    }

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
