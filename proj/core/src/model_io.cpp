#include "gwquant/model_io.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "gwquant/error.hpp"
#include "gwquant/io_util.hpp"
#include "gwquant/signal_csv.hpp"

namespace gwquant {

ModelKind parse_model_kind(std::string_view text) {
    if (text == "sgpr") return ModelKind::sgpr;
    if (text == "vhgpr") return ModelKind::vhgpr;
    fail(ErrorKind::invalid_argument, "unknown model kind '" + std::string(text) + "'");
}

std::string_view to_string(ModelKind kind) { return kind == ModelKind::sgpr ? "sgpr" : "vhgpr"; }

ModelKind kind_of(const AnyModel& model) {
    return std::holds_alternative<SgprModel>(model) ? ModelKind::sgpr : ModelKind::vhgpr;
}

const Regressor& as_regressor(const AnyModel& model) {
    return std::visit([](const auto& m) -> const Regressor& { return m; }, model);
}

namespace {

void write_vector(std::ostream& out, std::string_view key, const Eigen::VectorXd& v) {
    out << key;
    for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << format_real(v(i));
    out << '\n';
}

void write_kernel(std::ostream& out, std::string_view prefix, const KernelParams& k) {
    out << prefix << "log_output_variance " << format_real(k.log_output_variance) << '\n';
    write_vector(out, std::string(prefix) + "log_length_scales", k.log_length_scales);
}

void write_data(std::ostream& out, const Regressor& m) {
    out << "data\n";
    const auto& x = m.train_inputs();
    const auto& y = m.train_targets();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) out << format_real(x(i, j)) << ' ';
        out << format_real(y(i)) << '\n';
    }
}

class Fields {
public:
    Fields(std::map<std::string, std::vector<std::string>> values, std::string source)
        : values_(std::move(values)), source_(std::move(source)) {}

    const std::vector<std::string>& raw(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) fail(ErrorKind::schema, source_ + ": model file missing field '" + key + "'");
        return it->second;
    }
    double real(const std::string& key) const {
        const auto& v = raw(key);
        require(v.size() == 1, ErrorKind::schema, source_ + ": field '" + key + "' expects one value");
        return parse_real(v[0], source_ + ": " + key);
    }
    long long integer(const std::string& key) const {
        const auto& v = raw(key);
        require(v.size() == 1, ErrorKind::schema, source_ + ": field '" + key + "' expects one value");
        return parse_integer(v[0], source_ + ": " + key);
    }
    Eigen::VectorXd vector(const std::string& key, Eigen::Index expected) const {
        const auto& v = raw(key);
        require(static_cast<Eigen::Index>(v.size()) == expected, ErrorKind::schema,
                source_ + ": field '" + key + "' expects " + std::to_string(expected) + " values");
        Eigen::VectorXd out(expected);
        for (Eigen::Index i = 0; i < expected; ++i) out(i) = parse_real(v[static_cast<std::size_t>(i)], source_ + ": " + key);
        return out;
    }
    KernelParams kernel(const std::string& prefix, Eigen::Index dim) const {
        return KernelParams(real(prefix + "log_output_variance"), vector(prefix + "log_length_scales", dim));
    }

private:
    std::map<std::string, std::vector<std::string>> values_;
    std::string source_;
};

}  // namespace

void save_model(std::ostream& out, const AnyModel& model, std::optional<std::uint64_t> seed) {
    const Regressor& r = as_regressor(model);
    out << kModelSchema << ' ' << kModelSchemaVersion << '\n';
    out << "kind " << to_string(kind_of(model)) << '\n';
    if (seed) out << "seed " << *seed << '\n';
    out << "dim " << r.input_dim() << '\n';
    out << "n " << r.train_inputs().rows() << '\n';
    if (const auto* s = std::get_if<SgprModel>(&model)) {
        out << "target_offset " << format_real(s->target_offset()) << '\n';
        write_kernel(out, "", s->kernel());
        out << "log_noise_variance " << format_real(s->log_noise_variance()) << '\n';
    } else {
        const auto& v = std::get<VhgprModel>(model);
        out << "target_offset " << format_real(v.target_offset()) << '\n';
        write_kernel(out, "kernel_f.", v.params().kernel_f);
        write_kernel(out, "kernel_g.", v.params().kernel_g);
        out << "mu0 " << format_real(v.params().mu0) << '\n';
        write_vector(out, "variational_lambda", v.params().variational_lambda);
    }
    write_data(out, r);
}

void save_model(const std::filesystem::path& path, const AnyModel& model, std::optional<std::uint64_t> seed) {
    std::ostringstream buffer;
    save_model(buffer, model, seed);
    write_file_atomically(path, buffer.str());
}

AnyModel load_model(std::istream& in, const std::string& source_name) {
    std::string line;
    if (!std::getline(in, line)) fail(ErrorKind::schema, source_name + ": empty model file (no schema line)");
    {
        std::istringstream head(line);
        std::string schema;
        int version = 0;
        head >> schema >> version;
        if (schema != kModelSchema || version != kModelSchemaVersion) {
            fail(ErrorKind::schema, source_name + ": unsupported model schema '" + trim(line) + "' (expected " +
                                        std::string(kModelSchema) + " " + std::to_string(kModelSchemaVersion) + ")");
        }
    }

    std::map<std::string, std::vector<std::string>> values;
    std::vector<std::vector<std::string>> rows;
    bool in_data = false;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        std::istringstream tokens(t);
        std::vector<std::string> parts;
        for (std::string tok; tokens >> tok;) parts.push_back(tok);
        if (in_data) {
            rows.push_back(std::move(parts));
        } else if (parts.size() == 1 && parts[0] == "data") {
            in_data = true;
        } else {
            const std::string key = parts.front();
            parts.erase(parts.begin());
            values[key] = std::move(parts);
        }
    }
    const Fields f(std::move(values), source_name);
    const auto kind_field = f.raw("kind");
    require(kind_field.size() == 1, ErrorKind::schema, source_name + ": malformed kind");
    const auto dim = static_cast<Eigen::Index>(f.integer("dim"));
    const auto n = static_cast<Eigen::Index>(f.integer("n"));
    require(dim >= 1 && n >= 1, ErrorKind::schema, source_name + ": invalid dim/n");
    require(static_cast<Eigen::Index>(rows.size()) == n, ErrorKind::schema,
            source_name + ": expected " + std::to_string(n) + " data rows, found " + std::to_string(rows.size()));

    Eigen::MatrixXd x(n, dim);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        require(static_cast<Eigen::Index>(row.size()) == dim + 1, ErrorKind::schema,
                source_name + ": data row " + std::to_string(i) + " has wrong width");
        for (Eigen::Index j = 0; j < dim; ++j) x(i, j) = parse_real(row[static_cast<std::size_t>(j)], source_name);
        y(i) = parse_real(row.back(), source_name);
    }

    const double offset = f.real("target_offset");
    if (parse_model_kind(kind_field[0]) == ModelKind::sgpr) {
        return SgprModel(f.kernel("", dim), f.real("log_noise_variance"), std::move(x), std::move(y), offset);
    }
    VhgprParams p;
    p.kernel_f = f.kernel("kernel_f.", dim);
    p.kernel_g = f.kernel("kernel_g.", dim);
    p.mu0 = f.real("mu0");
    p.variational_lambda = f.vector("variational_lambda", n);
    return VhgprModel(std::move(p), std::move(x), std::move(y), offset);
}

AnyModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open " + path.string());
    return load_model(in, path.string());
}

}  // namespace gwquant
