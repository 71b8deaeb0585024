#include "cuspec/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "cuspec/error.hpp"

namespace cuspec {

namespace {

using json = nlohmann::json;

constexpr char kMagic[8] = {'C', 'U', 'S', 'P', 'E', 'C', '0', '1'};

const json& field(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw Error(ErrorKind::BadDocument, where + " has no \"" + key + "\"");
    return *it;
}

std::string as_id(const json& v, const std::string& where) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    throw Error(ErrorKind::BadDocument, where + ": vertex ids are strings");
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw Error(ErrorKind::BadDocument, where + " must be a number");
    return v.get<double>();
}

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw Error(ErrorKind::BadDocument, "truncated eigenvector header");
    return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
           static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

void put_double(std::ostream& out, double v) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

double get_double(std::istream& in) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) throw Error(ErrorKind::BadDocument, "truncated eigenvector data");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

}  // namespace

GraphDocument parse_graph_document(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::BadDocument, e.what());
    }
    if (!doc.is_object()) throw Error(ErrorKind::BadDocument, "graph document must be an object");
    const json& vs = field(doc, "vertices", "document");
    const json& es = field(doc, "edges", "document");
    if (!vs.is_array() || !es.is_array()) throw Error(ErrorKind::BadDocument, "vertices and edges must be arrays");

    std::vector<VertexSpec> vertices;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        const std::string where = "vertex " + std::to_string(i);
        if (!vs[i].is_object()) throw Error(ErrorKind::BadDocument, where + " must be an object");
        vertices.push_back({as_id(field(vs[i], "id", where), where), as_number(field(vs[i], "m", where), where + ".m")});
    }
    struct Raw {
        EdgeSpec spec;
        Phase phase;
    };
    std::vector<Raw> raw;
    for (std::size_t k = 0; k < es.size(); ++k) {
        const std::string where = "edge " + std::to_string(k);
        const json& e = es[k];
        if (!e.is_object()) throw Error(ErrorKind::BadDocument, where + " must be an object");
        Raw r;
        r.spec.u = as_id(field(e, "u", where), where);
        r.spec.v = as_id(field(e, "v", where), where);
        r.spec.weight = e.contains("weight") ? as_number(e["weight"], where + ".weight") : 1.0;
        if (e.contains("theta_rat") && !e["theta_rat"].is_null()) {
            const json& t = e["theta_rat"];
            if (!t.is_array() || t.size() != 2 || !t[0].is_number_integer() || !t[1].is_number_integer()) {
                throw Error(ErrorKind::BadDocument, where + ".theta_rat must be [p, q] with integers");
            }
            if (t[1].get<std::int64_t>() == 0) throw Error(ErrorKind::BadDocument, where + ".theta_rat has q = 0");
            r.phase = Phase::from_turns(Rational(t[0].get<std::int64_t>(), t[1].get<std::int64_t>()));
        } else if (e.contains("theta")) {
            r.phase = Phase::from_radians(as_number(e["theta"], where + ".theta"));
        }
        raw.push_back(std::move(r));
    }
    std::vector<EdgeSpec> specs;
    for (const auto& r : raw) specs.push_back(r.spec);
    WeightedGraph g = build_graph(std::move(vertices), std::move(specs));
    // zero-weight edges were dropped; line phases up with the stored edges
    std::vector<Phase> phases(g.edge_count());
    for (const auto& r : raw) {
        if (r.spec.weight == 0.0) continue;
        const std::size_t a = g.index_of(r.spec.u);
        const std::size_t b = g.index_of(r.spec.v);
        const std::size_t k = *g.find_edge(a, b);
        phases[k] = g.edge(k).u == a ? r.phase : -r.phase;
    }
    MagneticPotential theta = MagneticPotential::from_edge_phases(g, std::move(phases));
    return GraphDocument{std::move(g), std::move(theta)};
}

GraphDocument load_graph_document(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::BadDocument, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_graph_document(ss.str());
}

std::string graph_document_json(const WeightedGraph& g, const MagneticPotential& theta) {
    if (!theta.fits(g)) throw Error(ErrorKind::PotentialGraphMismatch, "document potential");
    json vs = json::array();
    for (std::size_t i = 0; i < g.vertex_count(); ++i) vs.push_back({{"id", g.id(i)}, {"m", g.measure(i)}});
    json es = json::array();
    for (std::size_t k = 0; k < g.edge_count(); ++k) {
        const Edge& e = g.edge(k);
        const Phase& p = theta.on_edge(k);
        json item = {{"u", g.id(e.u)}, {"v", g.id(e.v)}, {"weight", e.weight}, {"theta", p.reduced_radians()}};
        if (p.is_exact()) {
            const Rational t = p.reduced().turns().value();
            item["theta_rat"] = {t.num(), t.den()};
        }
        es.push_back(std::move(item));
    }
    json doc = {{"vertices", std::move(vs)}, {"edges", std::move(es)}};
    return doc.dump(2) + "\n";
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_spectrum_csv(std::ostream& out, const Eigen::VectorXd& values) {
    out << "index,eigenvalue\n";
    for (Eigen::Index i = 0; i < values.size(); ++i) out << (i + 1) << ',' << format_double(values(i)) << '\n';
}

void write_holonomy_csv(std::ostream& out, const WeightedGraph& g, const CycleBasis& basis,
                        std::span<const Phase> holonomies) {
    out << "cycle_index,non_tree_edge,flux_radians,flux_rational_p,flux_rational_q\n";
    for (std::size_t i = 0; i < basis.cycles.size(); ++i) {
        const Edge& e = g.edge(basis.cycles[i].non_tree_edge);
        const Phase r = holonomies[i].reduced();
        out << i << ',' << g.id(e.u) << "->" << g.id(e.v) << ',' << format_double(r.radians()) << ',';
        if (r.is_exact()) out << r.turns()->num() << ',' << r.turns()->den();
        else out << ',';
        out << '\n';
    }
}

void write_asymptotics_csv(std::ostream& out, const AsymptoticsReport& report) {
    out << "n,lambda_model,lambda_full,ratio,sandwich_ok\n";
    for (const auto& r : report.eigen) {
        out << r.n << ',' << format_double(r.model) << ',' << format_double(r.full) << ',' << format_double(r.ratio)
            << ',' << (r.sandwich_ok ? "true" : "false") << '\n';
    }
}

void write_counting_csv(std::ostream& out, std::span<const CountingRow> rows) {
    out << "lambda,N_model_shifted,N_full,N_model,sandwich_ok\n";
    for (const auto& r : rows) {
        out << format_double(r.lambda) << ',' << r.model_shifted << ',' << r.full << ',' << r.model << ','
            << (r.sandwich_ok ? "true" : "false") << '\n';
    }
}

void write_eigenvector_dump(std::ostream& out, const Eigen::MatrixXcd& vectors) {
    out.write(kMagic, sizeof kMagic);
    put_u32(out, static_cast<std::uint32_t>(vectors.rows()));
    put_u32(out, static_cast<std::uint32_t>(vectors.cols()));
    for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
        for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
            put_double(out, vectors(i, j).real());
            put_double(out, vectors(i, j).imag());
        }
    }
}

Eigen::MatrixXcd read_eigenvector_dump(std::istream& in) {
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
        throw Error(ErrorKind::BadDocument, "not an eigenvector dump");
    }
    const std::uint32_t dim = get_u32(in);
    const std::uint32_t count = get_u32(in);
    Eigen::MatrixXcd m(dim, count);
    for (std::uint32_t j = 0; j < count; ++j) {
        for (std::uint32_t i = 0; i < dim; ++i) {
            const double re = get_double(in);
            const double im = get_double(in);
            m(i, j) = Complex(re, im);
        }
    }
    return m;
}

}  // namespace cuspec
