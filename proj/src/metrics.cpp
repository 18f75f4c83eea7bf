#include "bqfl/metrics.hpp"

#include <cstdint>
#include <stdexcept>

namespace bqfl {

RoundMetrics from_counts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn) {
    RoundMetrics m{tp, fp, tn, fn};
    const std::size_t n = m.total();
    const std::size_t f = tp + fn;
    const std::size_t honest = tn + fp;
    m.detection_accuracy = n ? static_cast<double>(tp + tn) / static_cast<double>(n) : 1.0;
    const std::size_t f1_den = 2 * tp + fp + fn;
    m.f1 = f1_den ? 2.0 * static_cast<double>(tp) / static_cast<double>(f1_den) : 1.0;
    m.byzantine_rejection_rate = f ? static_cast<double>(tp) / static_cast<double>(f) : 1.0;
    m.honest_retention_rate = honest ? static_cast<double>(tn) / static_cast<double>(honest) : 1.0;
    return m;
}

RoundMetrics score_round(std::span<const std::size_t> selected, std::span<const ClientUpdate> updates) {
    std::vector<std::uint8_t> kept(updates.size(), 0);
    for (const auto i : selected) {
        if (i >= updates.size()) {
            throw std::invalid_argument("selected index outside the round");
        }
        kept[i] = 1;
    }
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < updates.size(); ++i) {
        const bool byz = updates[i].is_byzantine;
        if (kept[i]) {
            byz ? ++fn : ++tn;
        } else {
            byz ? ++tp : ++fp;
        }
    }
    return from_counts(tp, fp, tn, fn);
}

RoundMetrics aggregate_metrics(std::span<const RoundMetrics> rounds) {
    if (rounds.empty()) {
        throw std::invalid_argument("cannot aggregate zero rounds");
    }
    RoundMetrics out;
    for (const auto& r : rounds) {
        out.tp += r.tp;
        out.fp += r.fp;
        out.tn += r.tn;
        out.fn += r.fn;
        out.detection_accuracy += r.detection_accuracy;
        out.f1 += r.f1;
        out.byzantine_rejection_rate += r.byzantine_rejection_rate;
        out.honest_retention_rate += r.honest_retention_rate;
    }
    const auto count = static_cast<double>(rounds.size());
    out.detection_accuracy /= count;
    out.f1 /= count;
    out.byzantine_rejection_rate /= count;
    out.honest_retention_rate /= count;
    return out;
}

}  // namespace bqfl
