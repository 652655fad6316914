#include "povmkit/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace povmkit {

namespace {

Json complex_pairs(const Vector& v) {
    Json arr = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back({v[i].real(), v[i].imag()});
    return arr;
}

Json complex_pairs_row_major(const Matrix& m) {
    Json arr = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) arr.push_back({m(r, c).real(), m(r, c).imag()});
    return arr;
}

Vector vector_from_pairs(const Json& arr) {
    Vector v(static_cast<Eigen::Index>(arr.size()));
    for (size_t i = 0; i < arr.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = Complex(arr[i][0].get<double>(), arr[i][1].get<double>());
    return v;
}

Matrix matrix_from_pairs(const Json& arr, int dim) {
    if (arr.size() != static_cast<size_t>(dim) * static_cast<size_t>(dim))
        throw std::invalid_argument("povm json: dense effect has wrong entry count");
    Matrix m(dim, dim);
    size_t k = 0;
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c, ++k)
            m(r, c) = Complex(arr[k][0].get<double>(), arr[k][1].get<double>());
    return m;
}

}  // namespace

Json povm_to_json(const DiscretePOVM& povm) {
    const OutcomeSpace& space = povm.space();
    Json j;
    j["schema"] = 1;
    j["dim"] = povm.dim();

    Json js;
    js["kind"] = space_kind_name(space.kind());
    if (space.is_product())
        js["shape"] = {space.rows(), space.cols()};
    else
        js["shape"] = {space.size()};
    Json weights = Json::array();
    for (const auto& a : space.atoms()) weights.push_back(a.weight);
    js["weights"] = std::move(weights);
    Json measure;
    measure["kind"] = measure_kind_name(space.measure().kind);
    measure["total"] = space.measure().total;
    measure["infinite-ambient"] = space.measure().infinite_ambient;
    js["measure"] = std::move(measure);
    if (space.kind() == SpaceKind::PhaseGrid)
        js["grid"] = {{"half-width", space.half_width()}, {"cell-size", space.cell_size()}};
    j["space"] = std::move(js);

    Json atoms = Json::array();
    for (int i = 0; i < povm.atom_count(); ++i) {
        const auto& sa = space.atom(i);
        Json atom;
        atom["index"] = i;
        Json coord = Json::array();
        for (int k = 0; k < sa.coord_arity; ++k) coord.push_back(sa.coord[static_cast<size_t>(k)]);
        atom["coord"] = std::move(coord);
        const Effect& e = povm.atom_effect(i);
        if (e.rank_one_form())
            atom["effect"] = {{"rank1", {{"weight", e.weight()}, {"vector", complex_pairs(e.vector())}}}};
        else
            atom["effect"] = complex_pairs_row_major(e.to_dense());
        atoms.push_back(std::move(atom));
    }
    j["atoms"] = std::move(atoms);
    j["normalization_defect"] = povm.normalization_defect();
    j["defect_threshold"] = povm.defect_threshold();
    return j;
}

DiscretePOVM povm_from_json(const Json& j, const Tolerances& tol) {
    const int dim = j.at("dim").get<int>();
    const Json& js = j.at("space");
    const SpaceKind kind = space_kind_from_name(js.at("kind").get<std::string>());
    const auto weights = js.at("weights").get<std::vector<double>>();

    MeasureSpec measure;
    if (js.contains("measure")) {
        measure.kind = measure_kind_from_name(js.at("measure").at("kind").get<std::string>());
        measure.total = js.at("measure").at("total").get<double>();
        measure.infinite_ambient = js.at("measure").at("infinite-ambient").get<bool>();
    }

    OutcomeSpace space = [&]() -> OutcomeSpace {
        switch (kind) {
            case SpaceKind::WhLattice: {
                const int d = js.at("shape")[0].get<int>();
                return OutcomeSpace::lattice(d);
            }
            case SpaceKind::PhaseGrid: {
                const int n = js.at("shape")[0].get<int>();
                return OutcomeSpace::phase_grid(n, js.at("grid").at("half-width").get<double>(),
                                                js.at("grid").at("cell-size").get<double>());
            }
            case SpaceKind::Line: {
                std::vector<double> coords;
                for (const auto& atom : j.at("atoms")) coords.push_back(atom.at("coord")[0].get<double>());
                return OutcomeSpace::line(std::move(coords), weights, measure);
            }
            case SpaceKind::Abstract:
                return OutcomeSpace::abstract_space(weights, measure);
        }
        throw std::logic_error("unreachable");
    }();

    std::vector<Effect> effects;
    effects.reserve(j.at("atoms").size());
    for (const auto& atom : j.at("atoms")) {
        const Json& eff = atom.at("effect");
        if (eff.is_object()) {
            const Json& r1 = eff.at("rank1");
            effects.push_back(Effect::rank_one(r1.at("weight").get<double>(),
                                               vector_from_pairs(r1.at("vector"))));
        } else {
            effects.push_back(Effect::from_matrix(matrix_from_pairs(eff, dim), tol));
        }
    }
    std::optional<double> threshold;
    if (j.contains("defect_threshold")) threshold = j.at("defect_threshold").get<double>();
    return DiscretePOVM::assemble(std::move(space), dim, std::move(effects), tol, threshold);
}

std::string format_double_17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string kernel_to_csv(const MarkovKernel& kernel) {
    std::ostringstream out;
    for (int j = 0; j < kernel.cols(); ++j) {
        if (j) out << ',';
        out << j;
    }
    out << '\n';
    for (int x = 0; x < kernel.rows(); ++x) {
        for (int j = 0; j < kernel.cols(); ++j) {
            if (j) out << ',';
            out << format_double_17(kernel(x, j));
        }
        out << '\n';
    }
    return out.str();
}

MarkovKernel kernel_from_csv(const std::string& csv, double row_tol) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("kernel csv: empty");
    int cols = 1;
    for (char ch : line)
        if (ch == ',') ++cols;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        if (static_cast<int>(row.size()) != cols)
            throw std::invalid_argument("kernel csv: ragged row");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument("kernel csv: no data rows");
    RealMatrix m(static_cast<Eigen::Index>(rows.size()), cols);
    for (size_t r = 0; r < rows.size(); ++r)
        for (int c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<size_t>(c)];
    return MarkovKernel(std::move(m), row_tol);
}

bool json_all_finite(const Json& j) {
    if (j.is_number_float()) return std::isfinite(j.get<double>());
    if (j.is_object() || j.is_array()) {
        for (const auto& item : j)
            if (!json_all_finite(item)) return false;
    }
    return true;
}

std::string fnv1a_hex(const std::string& bytes) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string config_hash(Json config) {
    // The seed is recorded in reports but does not define the experiment.
    if (config.is_object()) config.erase("seed");
    return fnv1a_hex(config.dump());
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << contents;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace povmkit
