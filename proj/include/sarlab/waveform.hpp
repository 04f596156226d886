#pragma once

#include <variant>

#include <Eigen/Core>

#include "sarlab/types.hpp"

namespace sarlab {

/// Frequency-modulated continuous wave: a train of linear chirps.
struct FmcwParams {
    double start_frequency = 0.0;   // f0, Hz
    double ramp_slope = 0.0;        // K, Hz/s
    double chirp_duration = 0.0;    // Tc, s
    double repetition_interval = 0.0;  // Tr, s
    Index chirp_count = 0;          // Nc
    double sample_rate = 0.0;       // fS, Hz
    Index frequency_samples = 0;    // Nf used by the stepped-frequency simulation

    double bandwidth() const { return ramp_slope * chirp_duration; }
};

/// Phase-modulated continuous wave.
struct PmcwParams {
    double carrier = 0.0;        // fc, Hz
    double bandwidth = 0.0;      // chip bandwidth B, Hz
    double code_duration = 0.0;  // Td, s
    Index code_count = 0;        // Ncode
    Index frequency_samples = 0;
};

/// Orthogonal frequency-division multiplexing.
struct OfdmParams {
    double carrier = 0.0;             // fc, Hz
    Index subcarrier_count = 0;       // Nsc
    double subcarrier_spacing = 0.0;  // df, Hz
    double cyclic_prefix = 0.0;       // Tcp, s
    Index symbol_count = 0;           // Nsym
    double repetition_interval = 0.0; // Tr, s
    Index frequency_samples = 0;

    double symbol_duration() const { return 1.0 / subcarrier_spacing; }
    double bandwidth() const { return static_cast<double>(subcarrier_count) * subcarrier_spacing; }
};

using Waveform = std::variant<FmcwParams, PmcwParams, OfdmParams>;

struct DerivedMetrics {
    double bandwidth = 0.0;            // Hz
    double range_resolution = 0.0;     // m
    double max_range = 0.0;            // m
    double max_velocity = 0.0;         // m/s
    double velocity_resolution = 0.0;  // m/s
    double center_wavelength = 0.0;    // m
};

DerivedMetrics fmcw_derived(const FmcwParams& p);
DerivedMetrics pmcw_derived(const PmcwParams& p);
DerivedMetrics ofdm_derived(const OfdmParams& p);
DerivedMetrics derived_metrics(const Waveform& w);

void validate(const FmcwParams& p);
void validate(const PmcwParams& p);
void validate(const OfdmParams& p);

/// Occupied band of a waveform as used by the stepped-frequency simulation.
struct Band {
    double start = 0.0;     // Hz
    double bandwidth = 0.0; // Hz
    Index samples = 0;
    double center() const { return start + 0.5 * bandwidth; }
};

/// FMCW occupies [f0, f0 + K*Tc]; PMCW and OFDM are centred on their carrier.
Band band_of(const Waveform& w);

/// Uniformly spaced simulation frequencies.
class FrequencyAxis {
public:
    FrequencyAxis() = default;
    explicit FrequencyAxis(Eigen::VectorXd values);

    const Eigen::VectorXd& values() const { return values_; }
    Index size() const { return values_.size(); }
    double operator[](Index i) const { return values_[i]; }
    double step() const { return size() > 1 ? values_[1] - values_[0] : 0.0; }
    /// k = 2*pi*f/c for every sample.
    Eigen::VectorXd wavenumbers() const;

private:
    Eigen::VectorXd values_;
};

/// Nf samples spanning [f0, f0 + B] inclusive.
FrequencyAxis frequency_axis(double f0, double bandwidth, Index nf);
FrequencyAxis frequency_axis(const Band& band);

}  // namespace sarlab
