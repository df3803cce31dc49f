#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "gwquant/damage_index.hpp"

namespace gwquant {

struct TrainTestSplit {
    std::vector<Eigen::Index> train_rows;
    std::vector<Eigen::Index> test_rows;
};

/// Stratified split: rows sharing an input state are shuffled together and
/// ceil(train_fraction * count) of them go to training. A state with at
/// least two rows always keeps one held-out row. Row lists are ascending.
TrainTestSplit stratified_split(const Eigen::Ref<const Eigen::MatrixXd>& inputs, double train_fraction,
                                std::mt19937_64& rng);

DiDataset select_rows(const DiDataset& dataset, const std::vector<Eigen::Index>& rows);

}  // namespace gwquant
