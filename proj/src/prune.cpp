#include <slimchain/prune.hpp>

#include <algorithm>
#include <cstdio>

namespace slimchain {

namespace {

std::string unreachable_message(double p, double spent)
{
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "quantile %.4g is unreachable: only %.4g of the UTXOs in the interval were ever spent; "
                  "use an explicit block threshold instead",
                  p, spent);
    return buf;
}

} // namespace

QuantileUnreachable::QuantileUnreachable(double p, double spent_fraction)
    : std::runtime_error(unreachable_message(p, spent_fraction)), m_p(p), m_spent(spent_fraction) {}

std::uint64_t choose_prune_threshold(const LifespanCdf& cdf, double p)
{
    auto l = percentile(cdf, p);
    if (!l) throw QuantileUnreachable(p, cdf.spent_fraction());
    return *l;
}

std::uint64_t PruneConfig::resolve(const LifespanCdf* cdf) const
{
    if (const auto* e = std::get_if<ExplicitThreshold>(&mode)) return std::max<std::uint64_t>(e->blocks, 1);
    if (!cdf) throw std::invalid_argument("quantile pruning needs a lifespan distribution");
    return std::max<std::uint64_t>(choose_prune_threshold(*cdf, std::get<QuantileThreshold>(mode).p), 1);
}

PrunePlan plan_prune(Height tip, std::uint64_t threshold)
{
    PrunePlan plan;
    plan.tip = tip;
    plan.threshold = std::max<std::uint64_t>(threshold, 1);
    if (plan.threshold > tip) {
        plan.no_op = true;
        plan.cutoff = 0;
        plan.warning = "prune threshold " + std::to_string(plan.threshold) + " exceeds tip height " +
                       std::to_string(tip) + "; nothing pruned";
    } else {
        plan.cutoff = static_cast<Height>(tip - plan.threshold);
    }
    return plan;
}

} // namespace slimchain
