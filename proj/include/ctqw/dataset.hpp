#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ctqw/csv.hpp"
#include "ctqw/error.hpp"

namespace ctqw {

using Frame = std::vector<double>;
using Frames = std::vector<Frame>;

/**
 * Global min-max scaler: v -> (v - min) / (max - min).
 *
 * One (min, max) pair over every value of every frame, so the spatial shape
 * of a frame is preserved. Out-of-range values are not clamped. When
 * max == min, transform maps everything to 0 and inverse returns min.
 */
class Scaler {
public:
    Scaler() = default;
    Scaler(double min, double max) : min_(min), max_(max), fitted_(true) {
        if (!(max >= min)) fail(ErrorKind::InvalidArgument, "scaler: max must not be below min");
    }

    bool fitted() const { return fitted_; }
    double min() const { return min_; }
    double max() const { return max_; }
    double range() const { return max_ - min_; }

    double transform(double v) const {
        require_fitted();
        const double r = range();
        return r > 0.0 ? (v - min_) / r : 0.0;
    }

    double inverse(double s) const {
        require_fitted();
        return s * range() + min_;
    }

    Frame transform(const Frame& f) const {
        Frame out(f.size());
        std::transform(f.begin(), f.end(), out.begin(), [this](double v) { return transform(v); });
        return out;
    }

    Frame inverse(const Frame& f) const {
        Frame out(f.size());
        std::transform(f.begin(), f.end(), out.begin(), [this](double v) { return inverse(v); });
        return out;
    }

    Frames transform(const Frames& fs) const {
        Frames out;
        out.reserve(fs.size());
        for (const auto& f : fs) out.push_back(transform(f));
        return out;
    }

    Frames inverse(const Frames& fs) const {
        Frames out;
        out.reserve(fs.size());
        for (const auto& f : fs) out.push_back(inverse(f));
        return out;
    }

private:
    void require_fitted() const {
        if (!fitted_) fail(ErrorKind::InvalidArgument, "scaler: used before being fitted");
    }

    double min_ = 0.0;
    double max_ = 0.0;
    bool fitted_ = false;
};

inline Scaler fit_scaler(const Frames& frames) {
    bool any = false;
    double lo = 0.0, hi = 0.0;
    for (const auto& f : frames)
        for (double v : f) {
            if (!any) {
                lo = hi = v;
                any = true;
            }
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (!any) fail(ErrorKind::InvalidArgument, "fit_scaler: no data");
    return Scaler(lo, hi);
}

// Sidecar format: `min=<value>` and `max=<value>` on two lines.
inline void write_scaler(std::ostream& os, const Scaler& s) {
    os << "min=" << text::format_double(s.min()) << "\nmax=" << text::format_double(s.max()) << '\n';
}

inline Scaler read_scaler(std::istream& is) {
    std::optional<double> lo, hi;
    std::string line;
    while (std::getline(is, line)) {
        const auto t = text::trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) fail(ErrorKind::Format, "scaler file: expected key=value");
        const auto key = t.substr(0, eq);
        const double value = text::parse_double(t.substr(eq + 1), "scaler file");
        if (key == "min") lo = value;
        else if (key == "max") hi = value;
        else fail(ErrorKind::Format, "scaler file: unknown key '" + std::string(key) + "'");
    }
    if (!lo || !hi) fail(ErrorKind::Format, "scaler file: needs both min and max");
    return Scaler(*lo, *hi);
}

/// Supervised pairs: inputs[k] = frames[k..k+L), targets[k] = frames[k+L].
struct WindowedDataset {
    std::size_t lookback = 0;
    std::vector<Frames> inputs;
    Frames targets;
    std::vector<std::size_t> start_index;  // source frame index of inputs[k][0]
    std::vector<double> target_times;

    std::size_t size() const { return targets.size(); }
};

inline WindowedDataset windowize(const Frames& frames, std::size_t lookback,
                                 const std::vector<double>& times = {}) {
    if (lookback < 1) fail(ErrorKind::InvalidArgument, "windowize: lookback must be at least 1");
    if (frames.size() < lookback + 1)
        fail(ErrorKind::InvalidArgument, "windowize: need at least " + std::to_string(lookback + 1) +
                                             " frames for lookback " + std::to_string(lookback) + ", got " +
                                             std::to_string(frames.size()));
    if (!times.empty() && times.size() != frames.size())
        fail(ErrorKind::DimensionMismatch, "windowize: times and frames differ in length");

    WindowedDataset ds;
    ds.lookback = lookback;
    const std::size_t m = frames.size() - lookback;
    for (std::size_t k = 0; k < m; ++k) {
        ds.inputs.emplace_back(frames.begin() + static_cast<std::ptrdiff_t>(k),
                               frames.begin() + static_cast<std::ptrdiff_t>(k + lookback));
        ds.targets.push_back(frames[k + lookback]);
        ds.start_index.push_back(k);
        ds.target_times.push_back(times.empty() ? static_cast<double>(k + lookback) : times[k + lookback]);
    }
    return ds;
}

struct SplitDataset {
    WindowedDataset train;
    WindowedDataset test;
    double split_fraction = 0.8;
};

inline std::size_t train_count(std::size_t windows, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0))
        fail(ErrorKind::InvalidArgument, "split: fraction must lie strictly between 0 and 1");
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(windows)));
}

/// Chronological split: the first floor(fraction * M) windows train.
inline SplitDataset split(const WindowedDataset& ds, double fraction) {
    const std::size_t n_train = train_count(ds.size(), fraction);
    SplitDataset out;
    out.split_fraction = fraction;
    out.train.lookback = out.test.lookback = ds.lookback;
    for (std::size_t k = 0; k < ds.size(); ++k) {
        WindowedDataset& dst = k < n_train ? out.train : out.test;
        dst.inputs.push_back(ds.inputs[k]);
        dst.targets.push_back(ds.targets[k]);
        dst.start_index.push_back(ds.start_index[k]);
        dst.target_times.push_back(ds.target_times[k]);
    }
    return out;
}

/// Scaled, windowed, split data ready for training.
struct PreparedDataset {
    Scaler scaler;
    SplitDataset split;
};

/**
 * Fits the scaler on the frames seen by training windows only (inputs and
 * targets of the first floor(fraction * M) windows), then scales every frame
 * and windows the result.
 */
inline PreparedDataset prepare_dataset(const Frames& frames, const std::vector<double>& times,
                                       std::size_t lookback, double fraction) {
    const WindowedDataset raw = windowize(frames, lookback, times);
    const std::size_t n_train = train_count(raw.size(), fraction);
    if (n_train == 0) fail(ErrorKind::InvalidArgument, "prepare_dataset: split leaves no training windows");
    const Frames train_frames(frames.begin(), frames.begin() + static_cast<std::ptrdiff_t>(n_train + lookback));
    PreparedDataset out;
    out.scaler = fit_scaler(train_frames);
    out.split = split(windowize(out.scaler.transform(frames), lookback, times), fraction);
    return out;
}

/// Same layout, scaled with an already fitted scaler (e.g. a saved sidecar).
inline PreparedDataset prepare_dataset(const Frames& frames, const std::vector<double>& times, std::size_t lookback,
                                       double fraction, const Scaler& scaler) {
    PreparedDataset out;
    out.scaler = scaler;
    out.split = split(windowize(scaler.transform(frames), lookback, times), fraction);
    return out;
}

}  // namespace ctqw
