#include "sarlab/waveform.hpp"

#include <cmath>

#include "sarlab/error.hpp"

namespace sarlab {

namespace {

void require_positive(double v, const char* field) {
    if (!(std::isfinite(v) && v > 0.0)) throw ValidationError("must be positive and finite", field);
}

void require_positive(Index v, const char* field) {
    if (v <= 0) throw ValidationError("must be positive", field);
}

DerivedMetrics finish(double bandwidth, double lambda, double max_range, double max_velocity,
                      double velocity_resolution) {
    return {bandwidth, kSpeedOfLight / (2.0 * bandwidth), max_range, max_velocity, velocity_resolution, lambda};
}

}  // namespace

void validate(const FmcwParams& p) {
    require_positive(p.start_frequency, "waveform.f0");
    require_positive(p.ramp_slope, "waveform.K");
    require_positive(p.chirp_duration, "waveform.Tc");
    require_positive(p.repetition_interval, "waveform.Tr");
    require_positive(p.chirp_count, "waveform.Nc");
    require_positive(p.sample_rate, "waveform.fS");
    if (p.repetition_interval < p.chirp_duration) throw ValidationError("Tr must be >= Tc", "waveform.Tr");
    if (p.frequency_samples < 2) throw ValidationError("Nf must be >= 2", "waveform.Nf");
}

void validate(const PmcwParams& p) {
    require_positive(p.carrier, "waveform.fc");
    require_positive(p.bandwidth, "waveform.B");
    require_positive(p.code_duration, "waveform.Td");
    require_positive(p.code_count, "waveform.Ncode");
    if (p.frequency_samples < 2) throw ValidationError("Nf must be >= 2", "waveform.Nf");
    if (p.bandwidth >= 2.0 * p.carrier) throw ValidationError("band must stay above 0 Hz", "waveform.B");
}

void validate(const OfdmParams& p) {
    require_positive(p.carrier, "waveform.fc");
    require_positive(p.subcarrier_count, "waveform.Nsc");
    require_positive(p.subcarrier_spacing, "waveform.df");
    require_positive(p.cyclic_prefix, "waveform.Tcp");
    require_positive(p.symbol_count, "waveform.Nsym");
    require_positive(p.repetition_interval, "waveform.Tr");
    if (p.frequency_samples < 2) throw ValidationError("Nf must be >= 2", "waveform.Nf");
    if (p.bandwidth() >= 2.0 * p.carrier) throw ValidationError("band must stay above 0 Hz", "waveform.Nsc");
}

DerivedMetrics fmcw_derived(const FmcwParams& p) {
    validate(p);
    const double b = p.bandwidth();
    const double lambda = kSpeedOfLight / (p.start_frequency + 0.5 * b);
    const double max_range = p.sample_rate * kSpeedOfLight / (2.0 * p.ramp_slope);
    return finish(b, lambda, max_range, lambda / (4.0 * p.repetition_interval),
                  lambda / (2.0 * static_cast<double>(p.chirp_count) * p.repetition_interval));
}

DerivedMetrics pmcw_derived(const PmcwParams& p) {
    validate(p);
    const double lambda = kSpeedOfLight / p.carrier;
    return finish(p.bandwidth, lambda, kSpeedOfLight * p.code_duration / 2.0, lambda / (4.0 * p.code_duration),
                  lambda / (2.0 * static_cast<double>(p.code_count) * p.code_duration));
}

DerivedMetrics ofdm_derived(const OfdmParams& p) {
    validate(p);
    const double lambda = kSpeedOfLight / p.carrier;
    const double observation = static_cast<double>(p.symbol_count) * p.symbol_duration();
    return finish(p.bandwidth(), lambda, kSpeedOfLight * p.cyclic_prefix / 2.0,
                  lambda / (4.0 * p.repetition_interval), lambda / (2.0 * observation));
}

DerivedMetrics derived_metrics(const Waveform& w) {
    return std::visit(
        [](const auto& p) -> DerivedMetrics {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, FmcwParams>) return fmcw_derived(p);
            else if constexpr (std::is_same_v<T, PmcwParams>) return pmcw_derived(p);
            else return ofdm_derived(p);
        },
        w);
}

Band band_of(const Waveform& w) {
    return std::visit(
        [](const auto& p) -> Band {
            using T = std::decay_t<decltype(p)>;
            validate(p);
            if constexpr (std::is_same_v<T, FmcwParams>) {
                return {p.start_frequency, p.bandwidth(), p.frequency_samples};
            } else if constexpr (std::is_same_v<T, PmcwParams>) {
                return {p.carrier - 0.5 * p.bandwidth, p.bandwidth, p.frequency_samples};
            } else {
                return {p.carrier - 0.5 * p.bandwidth(), p.bandwidth(), p.frequency_samples};
            }
        },
        w);
}

FrequencyAxis::FrequencyAxis(Eigen::VectorXd values) : values_(std::move(values)) {
    if (values_.size() < 1 || !(values_[0] > 0.0)) throw ValidationError("frequency axis must start above 0 Hz", "freq");
    for (Index i = 1; i < values_.size(); ++i)
        if (!(values_[i] > values_[i - 1])) throw ValidationError("frequency axis must be strictly increasing", "freq");
}

Eigen::VectorXd FrequencyAxis::wavenumbers() const { return values_ * (kTwoPi / kSpeedOfLight); }

FrequencyAxis frequency_axis(double f0, double bandwidth, Index nf) {
    if (!(std::isfinite(f0) && f0 > 0.0)) throw ValidationError("f0 must be positive", "waveform.f0");
    if (!(std::isfinite(bandwidth) && bandwidth > 0.0)) throw ValidationError("bandwidth must be positive", "waveform.B");
    if (nf < 2) throw ValidationError("Nf must be >= 2", "waveform.Nf");
    Eigen::VectorXd v(nf);
    const double step = bandwidth / static_cast<double>(nf - 1);
    for (Index i = 0; i < nf; ++i) v[i] = f0 + step * static_cast<double>(i);
    v[nf - 1] = f0 + bandwidth;
    return FrequencyAxis(std::move(v));
}

FrequencyAxis frequency_axis(const Band& band) { return frequency_axis(band.start, band.bandwidth, band.samples); }

}  // namespace sarlab
