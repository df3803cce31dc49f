#include "gwquant/di_dataset.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "gwquant/error.hpp"
#include "gwquant/io_util.hpp"
#include "gwquant/signal_csv.hpp"

namespace gwquant {

void write_di_dataset_csv(std::ostream& out, const DiDataset& dataset, std::optional<std::uint64_t> seed) {
    if (seed) out << "# gwquant seed=" << *seed << '\n';
    for (const auto& name : dataset.column_names) out << name << ',';
    out << "di\n";
    for (Eigen::Index i = 0; i < dataset.size(); ++i) {
        for (Eigen::Index j = 0; j < dataset.dim(); ++j) out << format_real(dataset.inputs(i, j)) << ',';
        out << format_real(dataset.targets(i)) << '\n';
    }
}

void write_di_dataset_csv(const std::filesystem::path& path, const DiDataset& dataset,
                          std::optional<std::uint64_t> seed) {
    std::ostringstream buffer;
    write_di_dataset_csv(buffer, dataset, seed);
    write_file_atomically(path, buffer.str());
}

DiDataset read_di_dataset_csv(std::istream& in, const std::string& source_name) {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto fields = split(t, ',');
        const std::string where = source_name + ":" + std::to_string(line_no);
        if (header.empty()) {
            for (auto& f : fields) f = trim(f);
            static const std::vector<std::vector<std::string>> accepted = {
                {"damage", "di"}, {"damage", "load", "di"}, {"damage", "load", "switch", "di"}};
            bool ok = false;
            for (const auto& a : accepted) ok = ok || a == fields;
            if (!ok) fail(ErrorKind::schema, where + ": expected header damage[,load[,switch]],di; got '" + t + "'");
            header = std::move(fields);
            continue;
        }
        if (fields.size() != header.size()) {
            fail(ErrorKind::parse, where + ": expected " + std::to_string(header.size()) + " fields, got " +
                                       std::to_string(fields.size()));
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(parse_real(f, where));
        rows.push_back(std::move(row));
    }
    if (header.empty()) fail(ErrorKind::parse, source_name + ": missing DI dataset header");

    DiDataset ds;
    const auto dim = static_cast<Eigen::Index>(header.size() - 1);
    ds.column_names.assign(header.begin(), header.end() - 1);
    ds.inputs.resize(static_cast<Eigen::Index>(rows.size()), dim);
    ds.targets.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) ds.inputs(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
        ds.targets(static_cast<Eigen::Index>(i)) = rows[i].back();
    }
    ds.validate();
    return ds;
}

DiDataset read_di_dataset_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open " + path.string());
    return read_di_dataset_csv(in, path.string());
}

}  // namespace gwquant
