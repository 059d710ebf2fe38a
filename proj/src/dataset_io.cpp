#include "ignite/dataset_io.hpp"

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ignite/artifacts.hpp"
#include "ignite/errors.hpp"

namespace ignite {

using nlohmann::json;

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
    return std::filesystem::path(csv.string() + ".json");
}

void save_dataset(const std::filesystem::path& csv, const OfflineDataset& data, const Box& bounds) {
    data.validate();
    if (bounds.dim() != data.dim()) throw ShapeError("save_dataset: bounds dimension differs from dataset");
    if (csv.has_parent_path()) std::filesystem::create_directories(csv.parent_path());

    std::ofstream out(csv);
    if (!out) throw IoError("cannot write " + csv.string());
    for (std::size_t j = 0; j < data.dim(); ++j) out << "x_" << j << ',';
    out << "z_raw,z_norm\n";
    for (Eigen::Index i = 0; i < data.X.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.X.cols(); ++j) out << format_double(data.X(i, j)) << ',';
        out << format_double(data.z_raw[i]) << ',' << format_double(data.z_norm[i]) << '\n';
    }
    if (!out) throw IoError("write failed for " + csv.string());

    json meta = {
        {"task", data.task_name},
        {"dim", data.dim()},
        {"rows", data.size()},
        {"bounds", {{"lo", bounds.lo}, {"hi", bounds.hi}}},
        {"normalization", {{"y_min_box", data.y_min_box}, {"y_max_box", data.y_max_box}}},
        {"generation",
         {{"n_pool", data.gen.n_pool}, {"keep_quantile", data.gen.keep_quantile}, {"seed", data.gen.seed}}},
        {"pool_quantile", data.pool_quantile},
    };
    std::ofstream side(sidecar_path(csv));
    if (!side) throw IoError("cannot write " + sidecar_path(csv).string());
    side << meta.dump(2) << '\n';
}

StoredDataset load_dataset(const std::filesystem::path& csv) {
    const auto side_path = sidecar_path(csv);
    std::ifstream side(side_path);
    if (!side) throw IoError("missing dataset sidecar " + side_path.string());
    json meta;
    try {
        side >> meta;
    } catch (const json::exception& e) {
        throw IoError(side_path.string() + ": " + e.what());
    }

    StoredDataset out;
    std::size_t dim = 0, rows = 0;
    try {
        out.data.task_name = meta.at("task").get<std::string>();
        dim = meta.at("dim").get<std::size_t>();
        rows = meta.at("rows").get<std::size_t>();
        out.bounds.lo = meta.at("bounds").at("lo").get<std::vector<double>>();
        out.bounds.hi = meta.at("bounds").at("hi").get<std::vector<double>>();
        out.data.y_min_box = meta.at("normalization").at("y_min_box").get<double>();
        out.data.y_max_box = meta.at("normalization").at("y_max_box").get<double>();
        const auto& gen = meta.at("generation");
        out.data.gen.n_pool = gen.at("n_pool").get<std::size_t>();
        out.data.gen.keep_quantile = gen.at("keep_quantile").get<double>();
        out.data.gen.seed = gen.at("seed").get<std::uint64_t>();
        out.data.pool_quantile = meta.at("pool_quantile").get<double>();
    } catch (const json::exception& e) {
        throw IoError(side_path.string() + ": " + e.what());
    }
    out.bounds.validate();
    if (out.bounds.dim() != dim) throw IoError(side_path.string() + ": bounds do not match dim");

    std::ifstream in(csv);
    if (!in) throw IoError("cannot read " + csv.string());
    std::string line;
    if (!std::getline(in, line)) throw IoError(csv.string() + ": empty file");
    const auto header = split_csv_line(line);
    if (header.size() != dim + 2 || header[dim] != "z_raw" || header[dim + 1] != "z_norm") {
        throw IoError(csv.string() + ": unexpected header");
    }

    out.data.X.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dim));
    out.data.z_raw.resize(static_cast<Eigen::Index>(rows));
    out.data.z_norm.resize(static_cast<Eigen::Index>(rows));
    auto where = [&](std::size_t line) { return csv.string() + ":" + std::to_string(line); };
    std::size_t r = 0;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (r >= rows) throw IoError(csv.string() + ": more rows than the sidecar declares");
        const auto cells = split_csv_line(line);
        if (cells.size() != dim + 2) throw IoError(csv.string() + ":" + std::to_string(lineno) + ": wrong column count");
        const auto ri = static_cast<Eigen::Index>(r);
        for (std::size_t j = 0; j < dim; ++j) out.data.X(ri, static_cast<Eigen::Index>(j)) = parse_double_field(cells[j], where(lineno));
        out.data.z_raw[ri] = parse_double_field(cells[dim], where(lineno));
        out.data.z_norm[ri] = parse_double_field(cells[dim + 1], where(lineno));
        ++r;
    }
    if (r != rows) throw IoError(csv.string() + ": fewer rows than the sidecar declares");
    try {
        out.data.validate();
    } catch (const Error& e) {
        throw IoError(csv.string() + ": " + e.what());
    }
    return out;
}

}  // namespace ignite
