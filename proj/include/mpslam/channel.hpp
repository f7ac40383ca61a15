#pragma once

#include "mpslam/dictionary.hpp"

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <vector>

namespace mpslam {

// OFDM pilot-frame shape: N_k subcarriers at delta_f spacing, N_t/N_r array
// sizes, N_rf_t/N_rf_r RF chains, N_s pilot symbols. The cyclic prefix t_cp
// bounds the usable path delays and must not exceed the symbol period.
struct WaveformConfig {
    int n_k = 16;           // subcarriers
    double delta_f = 1e6;   // Hz, subcarrier spacing
    int n_t = 16;           // transmit antennas
    int n_r = 16;           // receive antennas
    int n_rf_t = 1;         // transmit RF chains
    int n_rf_r = 4;         // receive RF chains (observed streams per subcarrier)
    int n_s = 4;            // pilot symbols per frame
    double sigma_z2 = 0.0;  // noise variance, linear; 0 = noiseless
    double t_cp = 1e-6;     // seconds, cyclic prefix

    int blocks() const { return n_s * n_k; }
    int observation_size() const { return n_s * n_k * n_rf_r; }
    void validate() const;
};

// Pilot vectors and analog combiners for one frame, indexed by the flat block
// s * n_k + k. combiners[b] is n_r x n_rf_r (column r = w_{s,k,r}); pilots[b]
// is the length-n_t precoded pilot x_{s,k}. Columns are unit norm by
// construction in random_phases().
struct PilotFrame {
    std::vector<Eigen::MatrixXcd> combiners;
    std::vector<Eigen::VectorXcd> pilots;

    /// Constant-modulus entries exp(j*U(0,2pi))/sqrt(N) per column, seeded and
    /// reproducible; block b uses its own derived substream.
    static PilotFrame random_phases(const WaveformConfig& cfg, uint64_t seed);

    /// Throws std::invalid_argument when any dimension disagrees with cfg.
    void validate_against(const WaveformConfig& cfg) const;

    /// True when every combiner column and pilot has unit norm within tol.
    bool unit_norm(double tol = 1e-9) const;
};

// Stacked receiver-side samples for one frame, entry (s*n_k + k)*n_rf_r + r.
struct ComplexObservation {
    Eigen::VectorXcd y;

    static int index(int s, int k, int r, const WaveformConfig& cfg) {
        return (s * cfg.n_k + k) * cfg.n_rf_r + r;
    }
};

// One propagation path as the channel sees it: complex gain, delay relative
// to the receiver clock, departure angle, and arrival angle in the receiver
// frame.
struct ChannelPath {
    std::complex<double> alpha{1.0, 0.0};
    double delay = 0.0;  // seconds
    double aod = 0.0;    // radians
    double daoa = 0.0;   // radians
};

/// Half-wavelength ULA response, element n = exp(j*pi*n*sin(angle))/sqrt(N),
/// phase reference at element 0.
Eigen::VectorXcd steering(int n, double angle);

/// Noiseless unit-gain single-path observation
///   v_{s,k,r} = (w_{s,k,r}^H a_{N_r}(phi)) (a_{N_t}(theta)^T x_{s,k})
///               * exp(-j 2 pi k delta_f tau).
ComplexObservation dictionary_column(double tau, double theta, double phi,
                                     const PilotFrame& frame, const WaveformConfig& cfg);

/// y = sum_i alpha_i * v(tau_i, theta_i, daoa_i) + noise, the noise observed
/// through the combiners (w^H z, z circular Gaussian, variance sigma_z2 per
/// antenna). Exactly noiseless when sigma_z2 == 0. Delays outside [0, t_cp]
/// are rejected.
ComplexObservation synthesize(const std::vector<ChannelPath>& paths, const PilotFrame& frame,
                              const WaveformConfig& cfg, uint64_t noise_seed);

// Noise whitener R with R^H R = bdiag{ (W_{s,k}^H W_{s,k})^{-1} }, so that
// R^H R * Sigma_z = sigma_z2 * I. Built from a per-block Cholesky factor and
// independent of the noise level.
class Whitener {
  public:
    Whitener(const PilotFrame& frame, const WaveformConfig& cfg);

    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& m) const;

    /// Dense R, for small-frame checks.
    Eigen::MatrixXcd matrix() const;

  private:
    std::vector<Eigen::MatrixXcd> inv_l_;  // per-block L^{-1}, n_rf_r x n_rf_r
    int n_rf_r_ = 0;
};

struct GreedyStop {
    int max_paths = 8;
    double residual_threshold = 1e-12;  // on the whitened squared residual norm
};

struct RecoveredPath {
    std::complex<double> alpha;
    double delay = 0.0;
    double aod = 0.0;
    double daoa = 0.0;
    int tau_index = -1;
    int theta_index = -1;
    int phi_index = -1;
};

/// Greedy sparse recovery over the separable (delay x AoD x DAoA) dictionary:
/// pick the grid column with the largest whitened normalized correlation to
/// the residual, re-fit all selected amplitudes by least squares, repeat until
/// the whitened squared residual drops below the threshold or max_paths is
/// reached. Output is ordered by |alpha| descending.
std::vector<RecoveredPath> greedy_recover(const ComplexObservation& obs,
                                          const DictionaryConfig& dict_cfg,
                                          const PilotFrame& frame, const WaveformConfig& cfg,
                                          const GreedyStop& stop = {});

/// Fisher information of the stacked observation with respect to the
/// per-path parameters, ordered (aod_i, daoa_i, delay_i) for each path:
/// J = (2/sigma_z2) * Re{ (R D)^H (R D) }, D the analytic Jacobian of the
/// noiseless mean. Amplitudes are treated as known. Requires sigma_z2 > 0.
Eigen::MatrixXd measurement_fim(const std::vector<ChannelPath>& paths, const PilotFrame& frame,
                                const WaveformConfig& cfg);

}  // namespace mpslam
