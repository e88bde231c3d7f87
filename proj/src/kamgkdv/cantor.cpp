#include "kamgkdv/cantor.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "kamgkdv/parallel.hpp"
#include "kamgkdv/rng.hpp"

namespace kam {

bool membership_g0(const Vec& omega, double gamma, double tau, int L,
                   std::optional<Violation>* first) {
    int nu = int(omega.size());
    bool ok = true;
    LVec l = lzero();
    std::function<void(int)> rec = [&](int dim) {
        if (!ok) return;
        if (dim == nu) {
            int n1 = lnorm1(l, nu);
            if (n1 == 0) return;
            double lhs = std::abs(ldot(omega, l));
            double rhs = gamma / std::pow(double(n1), tau);
            if (lhs < rhs) {
                ok = false;
                if (first) {
                    Violation v;
                    v.l = l;
                    v.lhs = lhs;
                    v.rhs = rhs;
                    *first = v;
                }
            }
            return;
        }
        for (int k = -L; k <= L && ok; ++k) {
            l[size_t(dim)] = k;
            rec(dim + 1);
        }
        l[size_t(dim)] = 0;
    };
    rec(0);
    return ok;
}

SecondMelnikovScanner::SecondMelnikovScanner(const SiteSet& sites, const MelnikovScanConfig& cfg)
    : sites_(sites), cfg_(cfg) {
    wbar_ = linear_frequencies(sites);
    // admissible (j,k) pairs: normal indices (or 0) within the cut, j != k,
    // sorted by |j^3 - k^3| so the resonance pruning can binary-search
    for (int j = -cfg_.J; j <= cfg_.J; ++j) {
        if (sites_.contains(j)) continue;
        for (int k = j + 1; k <= cfg_.J; ++k) {
            if (sites_.contains(k)) continue;
            jk_pairs_.push_back({j, k});
        }
    }
    std::sort(jk_pairs_.begin(), jk_pairs_.end(), [](auto& a, auto& b) {
        auto d3 = [](const std::pair<int, int>& p) {
            return std::abs(double(p.first) * p.first * p.first -
                            double(p.second) * p.second * p.second);
        };
        return d3(a) < d3(b);
    });
}

bool SecondMelnikovScanner::check_triple(const Vec& omega, double m3, double m1, const LVec& l,
                                         int j, int k, Violation* out) const {
    double wl = ldot(omega, l);
    double d3 = double(j) * j * j - double(k) * k * k;
    double lhs = std::abs(wl - m3 * d3 + m1 * (j - k));
    int n1 = std::max(1, lnorm1(l, int(omega.size())));
    double rhs = 2.0 * cfg_.gamma_n * std::abs(d3) / std::pow(double(n1), cfg_.tau);
    if (lhs < rhs) {
        if (out) {
            out->l = l;
            out->j = j;
            out->k = k;
            out->lhs = lhs;
            out->rhs = rhs;
        }
        return true;
    }
    return false;
}

MelnikovDecision SecondMelnikovScanner::scan(const Vec& omega, double m3, double m1) const {
    MelnikovDecision dec;
    if (cfg_.exhaustive) return scan_exhaustive(omega, m3, m1);
    // resonance pruning: a violation needs
    //   |j^3-k^3| (m3 - 2 gamma_n) <= |omega.l| + |m1| (|j|+|k|),
    // so for each l only the pairs below the cutoff can reject.
    double denom = std::abs(m3) - 2.0 * cfg_.gamma_n;
    if (denom < 0.1) return scan_exhaustive(omega, m3, m1);
    int nu = int(omega.size());
    Violation v;
    bool rejected = false;
    LVec l = lzero();
    std::function<void(int)> rec = [&](int dim) {
        if (rejected) return;
        if (dim == nu) {
            double wl = std::abs(ldot(omega, l));
            double cutoff = (wl + std::abs(m1) * 2.0 * cfg_.J) / denom;
            // pairs are sorted by |d3|; scan the admissible prefix
            size_t lo = 0, hi = jk_pairs_.size();
            while (lo < hi) {
                size_t mid = (lo + hi) / 2;
                auto& p = jk_pairs_[mid];
                double d3 = std::abs(double(p.first) * p.first * p.first -
                                     double(p.second) * p.second * p.second);
                if (d3 <= cutoff)
                    lo = mid + 1;
                else
                    hi = mid;
            }
            for (size_t i = 0; i < lo; ++i) {
                auto& p = jk_pairs_[i];
                if (check_triple(omega, m3, m1, l, p.first, p.second, &v)) {
                    rejected = true;
                    dec.violation = v;
                    return;
                }
            }
            return;
        }
        for (int k2 = -cfg_.L; k2 <= cfg_.L && !rejected; ++k2) {
            l[size_t(dim)] = k2;
            rec(dim + 1);
        }
        l[size_t(dim)] = 0;
    };
    rec(0);
    dec.accepted = !rejected;
    return dec;
}

MelnikovDecision SecondMelnikovScanner::scan_exhaustive(const Vec& omega, double m3,
                                                        double m1) const {
    MelnikovDecision dec;
    dec.used_fast_path = false;
    int nu = int(omega.size());
    Violation v;
    LVec l = lzero();
    bool rejected = false;
    std::function<void(int)> rec = [&](int dim) {
        if (rejected) return;
        if (dim == nu) {
            for (auto& [j, k] : jk_pairs_) {
                if (check_triple(omega, m3, m1, l, j, k, &v)) {
                    rejected = true;
                    dec.violation = v;
                    return;
                }
            }
            return;
        }
        for (int k2 = -cfg_.L; k2 <= cfg_.L && !rejected; ++k2) {
            l[size_t(dim)] = k2;
            rec(dim + 1);
        }
        l[size_t(dim)] = 0;
    };
    rec(0);
    dec.accepted = !rejected;
    return dec;
}

SampleDecision cantor_sample(const Coefficients& c, const SiteSet& sites, const TwistData& twist,
                             double eps, const CantorConfig& cfg, uint64_t sample_index) {
    SampleDecision d;
    SplitMix64 g(mix_seed(cfg.seed, sample_index));
    int nu = sites.nu();
    d.xi = Vec(nu);
    for (int i = 0; i < nu; ++i) d.xi[i] = g.uniform(1.0, 2.0);
    d.omega = linear_frequencies(sites) + eps * eps * (twist.M * d.xi);

    double gamma = cfg.gamma_scale * std::pow(eps, 2.0 + cfg.a);
    std::optional<Violation> vio;
    d.g0 = membership_g0(d.omega, 2.0 * gamma, cfg.tau, cfg.L, &vio);
    if (!d.g0) {
        d.violation = vio;
        return d;
    }
    MelnikovScanConfig mc;
    mc.gamma_n = 2.0 * gamma; // first stage of the gap ladder
    mc.tau = cfg.tau;
    mc.L = cfg.L;
    mc.J = cfg.J;
    SecondMelnikovScanner scanner(sites, mc);
    SpectralConstants sc = spectral_constants(c, sites, d.xi);
    double m3 = 1.0 + eps * eps * sc.d_xi;
    double m1 = eps * eps * sc.c_xi;
    auto dec = scanner.scan(d.omega, m3, m1);
    d.melnikov = dec.accepted;
    d.violation = dec.violation;
    return d;
}

CantorTable estimate_cantor_fraction(const Coefficients& c, const SiteSet& sites,
                                     const TwistData& twist, const CantorConfig& cfg) {
    CantorTable table;
    for (double eps : cfg.eps_ladder) {
        double gamma = cfg.gamma_scale * std::pow(eps, 2.0 + cfg.a);
        MelnikovScanConfig mc;
        mc.gamma_n = 2.0 * gamma;
        mc.tau = cfg.tau;
        mc.L = cfg.L;
        mc.J = cfg.J;
        SecondMelnikovScanner scanner(sites, mc);
        Vec wbar = linear_frequencies(sites);

        std::vector<uint8_t> accept(size_t(cfg.n_samples), 0);
        std::vector<uint8_t> mismatch(size_t(cfg.n_samples), 0);
        parallel_for(size_t(cfg.n_samples), [&](size_t i) {
            SplitMix64 g(mix_seed(cfg.seed ^ uint64_t(std::llround(1e6 * eps)), i));
            int nu = sites.nu();
            Vec xi(nu);
            for (int q = 0; q < nu; ++q) xi[q] = g.uniform(1.0, 2.0);
            Vec omega = wbar + eps * eps * (twist.M * xi);
            bool ok = membership_g0(omega, 2.0 * gamma, cfg.tau, cfg.L, nullptr);
            SpectralConstants sc = spectral_constants(c, sites, xi);
            double m3 = 1.0 + eps * eps * sc.d_xi;
            double m1 = eps * eps * sc.c_xi;
            MelnikovDecision dec;
            if (ok) {
                dec = scanner.scan(omega, m3, m1);
                ok = dec.accepted;
            }
            accept[i] = ok ? 1 : 0;
            // soundness audit of the pruned scan on a random subset
            if (dec.used_fast_path && g.uniform() < cfg.audit_fraction) {
                auto full = scanner.scan_exhaustive(omega, m3, m1);
                bool okFull = membership_g0(omega, 2.0 * gamma, cfg.tau, cfg.L, nullptr) &&
                              full.accepted;
                if (okFull != (accept[i] != 0)) mismatch[i] = 1;
            }
        }, cfg.threads);

        CantorRow row;
        row.eps = eps;
        row.gamma = gamma;
        row.n_samples = cfg.n_samples;
        for (size_t i = 0; i < accept.size(); ++i) {
            row.accepted += accept[i];
            row.audit_mismatches += mismatch[i];
        }
        row.fraction = double(row.accepted) / cfg.n_samples;
        row.excluded = 1.0 - row.fraction;
        row.excluded_sigma =
            std::sqrt(std::max(row.fraction * (1 - row.fraction), 1e-12) / cfg.n_samples);
        table.rows.push_back(row);
    }
    // fitted exponent of the excluded fraction against eps
    std::vector<double> es, ex;
    for (auto& r : table.rows) {
        if (r.excluded <= 0) continue;
        es.push_back(r.eps);
        ex.push_back(r.excluded);
    }
    if (es.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (size_t i = 0; i < es.size(); ++i) {
            double x = std::log(es[i]), y = std::log(ex[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        double n = double(es.size());
        table.fitted_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    return table;
}

} // namespace kam
