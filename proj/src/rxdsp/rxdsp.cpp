#include "genlab/rxdsp/rxdsp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "genlab/channel/ssfm.hpp"

namespace genlab::rxdsp {

void cdc_compensate(DpWaveform& wave, double total_dispersion_ps_nm, double wavelength_nm, Fft& fft) {
    if (!std::isfinite(total_dispersion_ps_nm)) throw std::invalid_argument("total dispersion not finite");
    if (wave.sample_rate_hz <= 0) throw std::invalid_argument("waveform sample rate unset");
    if (total_dispersion_ps_nm == 0.0) return;

    const double beta2_total = channel::derive_beta2(total_dispersion_ps_nm, wavelength_nm);  // ps^2
    const double dt_ps = 1e12 / wave.sample_rate_hz;
    const std::vector<double> omega = fft_angular_freqs(wave.size(), dt_ps);
    for (auto* pol : {&wave.h, &wave.v}) {
        fft.forward(*pol);
        for (std::size_t k = 0; k < pol->size(); ++k) {
            const double phase = -0.5 * beta2_total * omega[k] * omega[k];
            (*pol)[k] *= cplx(std::cos(phase), std::sin(phase));
        }
        fft.inverse(*pol);
    }
}

std::vector<cplx> normalize_gain_phase(const std::vector<cplx>& rx, const std::vector<cplx>& tx) {
    if (rx.size() != tx.size()) throw std::invalid_argument("rx/tx length mismatch");
    if (rx.size() < 100) throw std::invalid_argument("need at least 100 symbols for gain estimate");
    cplx num(0.0, 0.0);
    double den = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        num += tx[i] * std::conj(rx[i]);
        den += std::norm(rx[i]);
    }
    if (den == 0.0) throw std::invalid_argument("all-zero rx");
    const cplx g = num / den;
    std::vector<cplx> out(rx.size());
    for (std::size_t i = 0; i < rx.size(); ++i) out[i] = g * rx[i];
    return out;
}

double mi_lower_bound(const std::vector<cplx>& rx, const std::vector<cplx>& tx,
                      const signal::Constellation& c, bool per_point_variance) {
    if (rx.size() != tx.size() || rx.empty()) throw std::invalid_argument("rx/tx length mismatch");
    const std::size_t n = rx.size();
    const std::size_t m = c.size();
    const double log2_m = std::log2(double(m));
    const double inv_ln2 = 1.4426950408889634073599246810019;

    if (!per_point_variance) {
        double sigma2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) sigma2 += std::norm(rx[i] - tx[i]);
        sigma2 /= double(n);
        if (sigma2 == 0.0) return log2_m;  // noiseless branch

        const double inv_s2 = 1.0 / sigma2;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double num_exp = -std::norm(rx[i] - tx[i]) * inv_s2;
            // log-sum-exp over the constellation; pi*sigma^2 cancels
            double max_e = -std::numeric_limits<double>::infinity();
            for (const cplx& x : c.points) max_e = std::max(max_e, -std::norm(rx[i] - x) * inv_s2);
            double sum = 0.0;
            for (const cplx& x : c.points) sum += std::exp(-std::norm(rx[i] - x) * inv_s2 - max_e);
            const double log_den = max_e + std::log(sum);
            acc += (num_exp - log_den) * inv_ln2;
        }
        return acc / double(n) + log2_m;
    }

    // one auxiliary variance per constellation point; normalizers no longer
    // cancel between numerator and denominator
    std::vector<double> sigma2(m, 0.0);
    std::vector<std::size_t> count(m, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t xi = signal::nearest_point(tx[i], c);
        sigma2[xi] += std::norm(rx[i] - tx[i]);
        count[xi] += 1;
    }
    double pooled = 0.0;
    for (std::size_t k = 0; k < m; ++k) pooled += sigma2[k];
    if (pooled == 0.0) return log2_m;
    pooled /= double(n);
    for (std::size_t k = 0; k < m; ++k)
        sigma2[k] = (count[k] > 0 && sigma2[k] > 0.0) ? sigma2[k] / double(count[k]) : pooled;

    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t xi = signal::nearest_point(tx[i], c);
        const double log_num = -std::norm(rx[i] - tx[i]) / sigma2[xi] - std::log(sigma2[xi]);
        double max_e = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < m; ++k)
            max_e = std::max(max_e, -std::norm(rx[i] - c.points[k]) / sigma2[k] - std::log(sigma2[k]));
        double sum = 0.0;
        for (std::size_t k = 0; k < m; ++k)
            sum += std::exp(-std::norm(rx[i] - c.points[k]) / sigma2[k] - std::log(sigma2[k]) - max_e);
        const double log_den = max_e + std::log(sum);
        acc += (log_num - log_den) * inv_ln2;
    }
    return acc / double(n) + log2_m;
}

double ber(const std::vector<cplx>& rx, const std::vector<cplx>& tx, const signal::Constellation& c) {
    if (rx.size() != tx.size()) throw std::invalid_argument("rx/tx length mismatch");
    if (rx.empty()) return 0.0;
    const auto rb = signal::demap_qam_hard(rx, c);
    const auto tb = signal::demap_qam_hard(tx, c);
    std::size_t errors = 0;
    for (std::size_t i = 0; i < rb.size(); ++i) errors += (rb[i] != tb[i]);
    return double(errors) / double(rb.size());
}

double cross_correlation(const std::vector<cplx>& a, const std::vector<cplx>& b, int max_lag) {
    if (a.size() < 100 || b.size() < 100) throw std::invalid_argument("sequences too short (< 100)");
    auto mean_of = [](const std::vector<cplx>& v) {
        cplx m(0.0, 0.0);
        for (const cplx& x : v) m += x;
        return m / double(v.size());
    };
    const cplx ma = mean_of(a);
    const cplx mb = mean_of(b);
    double va = 0.0, vb = 0.0;
    for (const cplx& x : a) va += std::norm(x - ma);
    for (const cplx& x : b) vb += std::norm(x - mb);
    va /= double(a.size());
    vb /= double(b.size());
    if (va == 0.0 || vb == 0.0) throw std::invalid_argument("zero-variance input");

    double best = 0.0;
    for (int lag = -max_lag; lag <= max_lag; ++lag) {
        cplx acc(0.0, 0.0);
        std::size_t count = 0;
        for (std::size_t i = 0; i < b.size(); ++i) {
            const long long j = (long long)i + lag;
            if (j < 0 || j >= (long long)a.size()) continue;
            acc += (a[std::size_t(j)] - ma) * std::conj(b[i] - mb);
            ++count;
        }
        if (count == 0) continue;
        const double r = std::abs(acc / double(count)) / std::sqrt(va * vb);
        best = std::max(best, r);
    }
    return best;
}

IqHistogram empirical_pdf(const std::vector<cplx>& symbols, double grid_min, double grid_max, int bins) {
    if (bins < 2) throw std::invalid_argument("bins must be >= 2");
    if (!(grid_max > grid_min)) throw std::invalid_argument("degenerate grid");
    if (symbols.empty()) throw std::invalid_argument("empty sample set");

    IqHistogram h;
    h.min = grid_min;
    h.max = grid_max;
    h.bins = bins;
    h.density.assign(std::size_t(bins) * bins, 0.0);
    const double w = (grid_max - grid_min) / bins;
    for (const cplx& s : symbols) {
        int bi = int(std::floor((s.real() - grid_min) / w));
        int bq = int(std::floor((s.imag() - grid_min) / w));
        const bool clamped = bi < 0 || bi >= bins || bq < 0 || bq >= bins;
        bi = std::clamp(bi, 0, bins - 1);
        bq = std::clamp(bq, 0, bins - 1);
        if (clamped) ++h.clamped_samples;
        h.at(bi, bq) += 1.0;
    }
    const double inv_n = 1.0 / double(symbols.size());
    for (double& d : h.density) d *= inv_n;
    return h;
}

std::string histogram_csv(const IqHistogram& h) {
    std::ostringstream os;
    os << "i_center,q_center,density\n";
    const double w = (h.max - h.min) / h.bins;
    char buf[96];
    for (int i = 0; i < h.bins; ++i) {
        for (int q = 0; q < h.bins; ++q) {
            const double ic = h.min + (i + 0.5) * w;
            const double qc = h.min + (q + 0.5) * w;
            std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g\n", ic, qc, h.at(i, q));
            os << buf;
        }
    }
    return os.str();
}

double total_variation(const IqHistogram& a, const IqHistogram& b) {
    if (a.bins != b.bins || a.min != b.min || a.max != b.max)
        throw std::invalid_argument("histograms on different grids");
    double tv = 0.0;
    for (std::size_t i = 0; i < a.density.size(); ++i) tv += std::abs(a.density[i] - b.density[i]);
    return 0.5 * tv;
}

}  // namespace genlab::rxdsp
