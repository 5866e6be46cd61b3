#pragma once

#include "sparsevss/common.hpp"

#include <iosfwd>
#include <vector>

namespace sparsevss {

/// Sparse MIMO channel: row r is the MISO vector [h_{r,1}^T, ..., h_{r,Nt}^T]
/// seen by receive antenna r, each link holding `tap_length` taps of which
/// exactly `sparsity` are nonzero.
struct ChannelMatrix {
    CMatrix entries;  ///< n_r x (n_t * tap_length)
    int n_t{0};
    int n_r{0};
    int tap_length{0};
    int sparsity{0};
    /// Sorted nonzero tap indices per link, link id = rx * n_t + tx.
    std::vector<std::vector<int>> support;

    CVector row(int rx) const { return entries.row(rx).transpose(); }
    CVector link(int rx, int tx) const
    {
        return entries.row(rx).segment(static_cast<Eigen::Index>(tx) * tap_length, tap_length).transpose();
    }
    int link_id(int rx, int tx) const { return rx * n_t + tx; }
};

struct NoiseModel {
    double variance{0.0};  ///< sigma_n^2 per complex sample
    double snr_db{0.0};

    /// sigma_n^2 = received_power * 10^(-snr_db / 10).
    static NoiseModel from_snr(double snr_db, double received_power);
    static NoiseModel noiseless() { return {}; }
};

/// Draws `sparsity` distinct tap positions per link uniformly, CN(0, 1) values
/// on them, then scales every MISO row to unit l2 norm.
ChannelMatrix generate_sparse_channel(Rng& rng, int n_t, int n_r, int tap_length, int sparsity);

/// h_row^T x + z, z ~ CN(0, noise.variance). No draw is taken when the
/// variance is zero.
cdouble apply_channel(const CVector& h_row, const CVector& x, const NoiseModel& noise, Rng& rng);

/// CSV with header `link,tap,re,im`; every tap of every link is written.
void write_channel_csv(std::ostream& out, const ChannelMatrix& channel);
/// Inverse of write_channel_csv for the given shape. Support is rebuilt from
/// the nonzero taps.
ChannelMatrix read_channel_csv(std::istream& in, int n_t, int n_r, int tap_length);

}  // namespace sparsevss
