#ifndef SLIMCHAIN_PRUNE_HPP
#define SLIMCHAIN_PRUNE_HPP

#include <slimchain/analytics.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>

namespace slimchain {

/** The requested quantile is above the fraction of UTXOs that were ever spent. */
class QuantileUnreachable : public std::runtime_error {
public:
    QuantileUnreachable(double p, double spent_fraction);
    double p() const noexcept { return m_p; }
    double spent_fraction() const noexcept { return m_spent; }

private:
    double m_p;
    double m_spent;
};

struct ExplicitThreshold {
    std::uint64_t blocks = 1;
};
struct QuantileThreshold {
    double p = 0.9;
};

struct PruneConfig {
    std::variant<ExplicitThreshold, QuantileThreshold> mode;

    static PruneConfig blocks(std::uint64_t n) { return PruneConfig{ExplicitThreshold{n}}; }
    static PruneConfig quantile(double p) { return PruneConfig{QuantileThreshold{p}}; }

    /** Threshold L in blocks (at least 1). Quantile mode needs @p cdf and may throw QuantileUnreachable. */
    std::uint64_t resolve(const LifespanCdf* cdf) const;
};

/** L = percentile(cdf, p), possibly 0 when most spends happen in the creating block. Throws QuantileUnreachable, or std::invalid_argument for p outside (0,1]. */
std::uint64_t choose_prune_threshold(const LifespanCdf& cdf, double p);

/** Which heights keep their bodies once blocks older than tip - L are pruned. */
struct PrunePlan {
    Height tip = 0;
    std::uint64_t threshold = 1;
    Height cutoff = 0;     ///< first height that keeps its body
    bool no_op = false;    ///< L exceeded the tip: everything kept
    std::string warning;

    bool pruned(Height h) const noexcept { return h < cutoff; }
    std::uint64_t pruned_count() const noexcept { return cutoff; }
};

PrunePlan plan_prune(Height tip, std::uint64_t threshold);

} // namespace slimchain

#endif // SLIMCHAIN_PRUNE_HPP
