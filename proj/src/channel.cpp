#include "sparsevss/channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

namespace sparsevss {

NoiseModel NoiseModel::from_snr(double snr_db, double received_power)
{
    if (!(received_power > 0.0) || !std::isfinite(snr_db)) {
        throw ContractViolation("NoiseModel: received power must be > 0 and SNR finite");
    }
    return {received_power * std::pow(10.0, -snr_db / 10.0), snr_db};
}

ChannelMatrix generate_sparse_channel(Rng& rng, int n_t, int n_r, int tap_length, int sparsity)
{
    if (n_t < 1 || n_r < 1 || tap_length < 1) {
        throw ContractViolation("generate_sparse_channel: antenna counts and tap length must be >= 1");
    }
    if (sparsity < 1 || sparsity > tap_length) {
        throw ContractViolation("generate_sparse_channel: sparsity must lie in [1, tap_length]");
    }

    ChannelMatrix ch;
    ch.n_t = n_t;
    ch.n_r = n_r;
    ch.tap_length = tap_length;
    ch.sparsity = sparsity;
    ch.entries = CMatrix::Zero(n_r, static_cast<Eigen::Index>(n_t) * tap_length);
    ch.support.resize(static_cast<std::size_t>(n_r) * n_t);

    std::vector<int> positions(static_cast<std::size_t>(tap_length));
    for (int rx = 0; rx < n_r; ++rx) {
        for (int tx = 0; tx < n_t; ++tx) {
            // Partial Fisher-Yates: the first `sparsity` slots are a uniform
            // sample without replacement.
            std::iota(positions.begin(), positions.end(), 0);
            for (int i = 0; i < sparsity; ++i) {
                std::uniform_int_distribution<int> pick(i, tap_length - 1);
                std::swap(positions[static_cast<std::size_t>(i)],
                          positions[static_cast<std::size_t>(pick(rng))]);
            }
            auto& support = ch.support[static_cast<std::size_t>(ch.link_id(rx, tx))];
            support.assign(positions.begin(), positions.begin() + sparsity);
            std::sort(support.begin(), support.end());
            for (int tap : support) {
                ch.entries(rx, static_cast<Eigen::Index>(tx) * tap_length + tap) = complex_gaussian(rng, 1.0);
            }
        }
        ch.entries.row(rx) /= ch.entries.row(rx).norm();
    }
    return ch;
}

cdouble apply_channel(const CVector& h_row, const CVector& x, const NoiseModel& noise, Rng& rng)
{
    if (h_row.size() != x.size()) {
        throw ContractViolation("apply_channel: channel row and regressor lengths differ");
    }
    cdouble y = (h_row.transpose() * x).value();
    if (noise.variance > 0.0) {
        y += complex_gaussian(rng, noise.variance);
    }
    return y;
}

void write_channel_csv(std::ostream& out, const ChannelMatrix& channel)
{
    out << "link,tap,re,im\n";
    char buf[96];
    for (int rx = 0; rx < channel.n_r; ++rx) {
        for (int tx = 0; tx < channel.n_t; ++tx) {
            for (int tap = 0; tap < channel.tap_length; ++tap) {
                const cdouble v = channel.entries(rx, static_cast<Eigen::Index>(tx) * channel.tap_length + tap);
                std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", channel.link_id(rx, tx), tap, v.real(),
                              v.imag());
                out << buf;
            }
        }
    }
}

ChannelMatrix read_channel_csv(std::istream& in, int n_t, int n_r, int tap_length)
{
    ChannelMatrix ch;
    ch.n_t = n_t;
    ch.n_r = n_r;
    ch.tap_length = tap_length;
    ch.entries = CMatrix::Zero(n_r, static_cast<Eigen::Index>(n_t) * tap_length);
    ch.support.resize(static_cast<std::size_t>(n_r) * n_t);

    std::string line;
    if (!std::getline(in, line) || line != "link,tap,re,im") {
        throw ContractViolation("read_channel_csv: missing header");
    }
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        int link = 0;
        int tap = 0;
        double re = 0.0;
        double im = 0.0;
        if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &link, &tap, &re, &im) != 4 || link < 0 ||
            link >= n_t * n_r || tap < 0 || tap >= tap_length) {
            throw ContractViolation("read_channel_csv: malformed row '" + line + "'");
        }
        const int rx = link / n_t;
        const int tx = link % n_t;
        ch.entries(rx, static_cast<Eigen::Index>(tx) * tap_length + tap) = {re, im};
        if (re != 0.0 || im != 0.0) {
            ch.support[static_cast<std::size_t>(link)].push_back(tap);
        }
    }
    std::size_t first = ch.support.empty() ? 0 : ch.support.front().size();
    ch.sparsity = static_cast<int>(first);
    for (auto& s : ch.support) {
        std::sort(s.begin(), s.end());
        if (s.size() != first) {
            ch.sparsity = 0;  // not uniformly sparse
        }
    }
    return ch;
}

}  // namespace sparsevss
