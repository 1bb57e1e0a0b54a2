#ifndef CONTEXTURE_TESTS_PLANTED_HPP
#define CONTEXTURE_TESTS_PLANTED_HPP

// Synthetic tabular dataset whose target is the top nontrivial eigenfunction
// of a chosen context built on the pretrain split, carried to every row by
// the sweep's own extension rule.

#include "contexture/experiment.hpp"
#include "contexture/random.hpp"
#include "contexture/spectral.hpp"
#include "contexture/verify.hpp"

#include <string>

namespace planted {

using namespace contexture;

inline LoadedDataset dataset(Index n, Index p, const std::string& descriptor, const ExperimentConfig& config,
                             std::uint64_t data_seed) {
    Rng rng(data_seed);
    LoadedDataset data;
    for (Index j = 0; j < p; ++j) data.feature_names.push_back("x" + std::to_string(j));
    data.target_name = "y";
    data.points.points = random_normal(n, p, rng);
    data.targets = Vector::Zero(n);

    const auto prep = prepare_data(data, config);
    PointSet pre;
    pre.points = prep.pretrain;
    const auto ctx = build_context(ContextDescriptor::parse(descriptor), pre,
                                   DiscreteDistribution::uniform(pre.size()), config.seed);
    const auto spec = contexture_svd(ctx, 2);
    const Matrix mu1 = spec.left.col(1);
    const auto z = Standardizer::fit(data.points.points(prep.splits[0], Eigen::all));
    data.targets = extend_encoder(prep.pretrain, mu1, z.apply(data.points.points)).col(0);
    data.points.labels = data.targets;
    return data;
}

} // namespace planted

#endif // CONTEXTURE_TESTS_PLANTED_HPP
