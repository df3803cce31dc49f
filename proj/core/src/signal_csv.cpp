#include "gwquant/signal_csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "gwquant/error.hpp"
#include "gwquant/io_util.hpp"

namespace gwquant {

std::string format_real(double value) {
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc{}) fail(ErrorKind::io, "failed to format real");
    return std::string(buffer, ptr);
}

void write_signals_csv(std::ostream& out, std::span<const Signal> signals, std::optional<std::uint64_t> seed) {
    if (seed) out << "# gwquant seed=" << *seed << '\n';
    bool first = true;
    for (const auto& s : signals) {
        if (!first) out << '\n';
        first = false;
        const auto& st = s.state();
        out << "# signal damage=" << format_real(st.damage_size) << " load=" << format_real(st.load)
            << " replicate=" << st.replicate << " role=" << to_string(st.role)
            << " sample_rate=" << format_real(s.sample_rate()) << '\n';
        for (double v : s.samples()) out << format_real(v) << '\n';
    }
}

void write_signals_csv(const std::filesystem::path& path, std::span<const Signal> signals,
                       std::optional<std::uint64_t> seed) {
    std::ostringstream buffer;
    write_signals_csv(buffer, signals, seed);
    write_file_atomically(path, buffer.str());
}

namespace {

struct PendingSection {
    StateLabel state;
    double sample_rate = 0.0;
    std::vector<double> samples;
    std::size_t header_line = 0;
    std::string header;
};

PendingSection parse_header(const std::string& line, std::size_t line_no, const std::string& source) {
    PendingSection section;
    section.header_line = line_no;
    section.header = line;
    std::istringstream fields(line.substr(std::string("# signal").size()));
    bool has_damage = false, has_load = false, has_replicate = false, has_role = false, has_rate = false;
    std::string token;
    auto where = [&] { return source + ":" + std::to_string(line_no); };
    while (fields >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) fail(ErrorKind::parse, where() + ": malformed header field '" + token + "'");
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "damage") {
            section.state.damage_size = parse_real(value, where());
            has_damage = true;
        } else if (key == "load") {
            section.state.load = parse_real(value, where());
            has_load = true;
        } else if (key == "replicate") {
            section.state.replicate = static_cast<int>(parse_integer(value, where()));
            has_replicate = true;
        } else if (key == "role") {
            section.state.role = parse_signal_role(value);
            has_role = true;
        } else if (key == "sample_rate") {
            section.sample_rate = parse_real(value, where());
            has_rate = true;
        } else {
            fail(ErrorKind::schema, where() + ": unknown header field '" + key + "'");
        }
    }
    if (!(has_damage && has_load && has_replicate && has_role && has_rate)) {
        fail(ErrorKind::schema, where() + ": signal header missing required fields: " + line);
    }
    return section;
}

}  // namespace

std::vector<Signal> read_signals_csv(std::istream& in, const std::string& source_name) {
    std::vector<Signal> signals;
    std::optional<PendingSection> current;
    auto flush = [&] {
        if (!current) return;
        if (current->samples.empty()) {
            fail(ErrorKind::parse, source_name + ":" + std::to_string(current->header_line) +
                                       ": empty data section after header '" + current->header + "'");
        }
        signals.emplace_back(std::move(current->samples), current->sample_rate, current->state);
        current.reset();
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string trimmed = trim(line);
        if (trimmed.rfind("# signal", 0) == 0) {
            flush();
            current = parse_header(trimmed, line_no, source_name);
            continue;
        }
        if (trimmed.empty() || trimmed.front() == '#') continue;
        if (!current) {
            fail(ErrorKind::parse, source_name + ":" + std::to_string(line_no) + ": sample before any signal header");
        }
        current->samples.push_back(parse_real(trimmed, source_name + ":" + std::to_string(line_no)));
    }
    flush();
    return signals;
}

std::vector<Signal> read_signals_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open " + path.string());
    return read_signals_csv(in, path.string());
}

}  // namespace gwquant
