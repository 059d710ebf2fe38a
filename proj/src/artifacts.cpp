#include "ignite/artifacts.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ignite/errors.hpp"

namespace ignite {

using nlohmann::json;

std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

double parse_double_field(std::string_view text, const std::string& where) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw IoError(where + ": bad number '" + std::string(text) + "'");
    }
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw IoError("csv: missing column '" + name + "'");
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    t.header = split_csv_line(line);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != t.header.size()) {
            throw IoError(path.string() + ": row " + std::to_string(t.rows.size() + 1) + " has " +
                          std::to_string(cells.size()) + " fields, header has " + std::to_string(t.header.size()));
        }
        t.rows.push_back(std::move(cells));
    }
    return t;
}

json spec_to_json(const MlpSpec& spec) {
    return {{"input_dim", spec.input_dim},
            {"hidden_widths", spec.hidden_widths},
            {"hidden_activation", std::string(to_string(spec.hidden_activation))},
            {"output_activation", std::string(to_string(spec.output_activation))}};
}

MlpSpec spec_from_json(const json& j) {
    MlpSpec s;
    s.input_dim = j.at("input_dim").get<std::size_t>();
    s.hidden_widths = j.at("hidden_widths").get<std::vector<std::size_t>>();
    s.hidden_activation = parse_hidden_activation(j.at("hidden_activation").get<std::string>());
    s.output_activation = parse_output_activation(j.at("output_activation").get<std::string>());
    s.validate();
    return s;
}

void save_surrogate(const std::filesystem::path& path, const Surrogate& s) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    // params as strings keep the exact bit pattern through any JSON reader
    std::vector<std::string> params;
    params.reserve(s.params().size());
    for (double v : s.params().span()) params.push_back(format_double(v));
    const json j = {{"spec", spec_to_json(s.spec())}, {"params", params}};
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump() << '\n';
}

Surrogate load_surrogate(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    try {
        json j;
        in >> j;
        const MlpSpec spec = spec_from_json(j.at("spec"));
        const auto raw = j.at("params").get<std::vector<std::string>>();
        ParamVector p(raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i) p[i] = parse_double_field(raw[i], path.string());
        return Surrogate(spec, std::move(p));
    } catch (const json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void save_candidates(const std::filesystem::path& path, const CandidateSet& c) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    for (Eigen::Index j = 0; j < c.designs.cols(); ++j) out << "x_" << j << ',';
    out << "surrogate_score";
    if (c.oracle_scores) out << ",oracle_score";
    out << '\n';
    for (Eigen::Index i = 0; i < c.designs.rows(); ++i) {
        for (Eigen::Index j = 0; j < c.designs.cols(); ++j) out << format_double(c.designs(i, j)) << ',';
        out << format_double(c.surrogate_scores[i]);
        if (c.oracle_scores) out << ',' << format_double((*c.oracle_scores)[i]);
        out << '\n';
    }
}

CandidateSet load_candidates(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    const std::size_t score_col = t.column("surrogate_score");
    const bool has_oracle = t.header.back() == "oracle_score";
    const auto n = static_cast<Eigen::Index>(t.rows.size());
    const auto d = static_cast<Eigen::Index>(score_col);
    CandidateSet c;
    c.designs.resize(n, d);
    c.surrogate_scores.resize(n);
    if (has_oracle) c.oracle_scores = Vector(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = t.rows[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < d; ++j) c.designs(i, j) = parse_double_field(row[static_cast<std::size_t>(j)], path.string());
        c.surrogate_scores[i] = parse_double_field(row[score_col], path.string());
        if (has_oracle) (*c.oracle_scores)[i] = parse_double_field(row.back(), path.string());
    }
    return c;
}

void write_trace_csv(const std::filesystem::path& path, const TrainTrace& trace, double rho) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << kTraceHeader << '\n';
    for (const auto& r : trace.records) {
        out << r.iter << ',' << format_double(r.loss) << ',' << format_double(r.grad_norm) << ','
            << format_double(rho * r.grad_norm) << ',' << format_double(r.lambda) << ','
            << format_double(r.constraint) << '\n';
    }
}

}  // namespace ignite
