#include "gwquant/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gwquant/error.hpp"

namespace gwquant {

TrainTestSplit stratified_split(const Eigen::Ref<const Eigen::MatrixXd>& inputs, double train_fraction,
                                std::mt19937_64& rng) {
    require(train_fraction > 0.0 && train_fraction < 1.0, ErrorKind::invalid_argument,
            "train_fraction must lie in (0, 1)");
    std::map<std::vector<double>, std::vector<Eigen::Index>> strata;
    for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
        std::vector<double> key(static_cast<std::size_t>(inputs.cols()));
        for (Eigen::Index j = 0; j < inputs.cols(); ++j) {
            key[static_cast<std::size_t>(j)] = inputs(i, j);
        }
        strata[key].push_back(i);
    }
    TrainTestSplit split;
    for (auto& [key, rows] : strata) {
        // Fisher-Yates driven directly by the engine so the permutation does
        // not depend on the standard library's shuffle implementation.
        for (std::size_t i = rows.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(rng() % i);
            std::swap(rows[i - 1], rows[j]);
        }
        const std::size_t count = rows.size();
        auto n_train = static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(count)));
        if (count >= 2 && n_train >= count) {
            n_train = count - 1;
        }
        split.train_rows.insert(split.train_rows.end(), rows.begin(), rows.begin() + static_cast<long>(n_train));
        split.test_rows.insert(split.test_rows.end(), rows.begin() + static_cast<long>(n_train), rows.end());
    }
    std::sort(split.train_rows.begin(), split.train_rows.end());
    std::sort(split.test_rows.begin(), split.test_rows.end());
    return split;
}

DiDataset select_rows(const DiDataset& dataset, const std::vector<Eigen::Index>& rows) {
    DiDataset out;
    out.column_names = dataset.column_names;
    out.inputs.resize(static_cast<Eigen::Index>(rows.size()), dataset.dim());
    out.targets.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const Eigen::Index r = rows[k];
        require(r >= 0 && r < dataset.size(), ErrorKind::invalid_argument, "row index out of range");
        out.inputs.row(static_cast<Eigen::Index>(k)) = dataset.inputs.row(r);
        out.targets(static_cast<Eigen::Index>(k)) = dataset.targets(r);
    }
    return out;
}

}  // namespace gwquant
