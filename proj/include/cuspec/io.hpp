#ifndef CUSPEC_IO_HPP
#define CUSPEC_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cuspec/cusp.hpp"
#include "cuspec/graph.hpp"
#include "cuspec/magnetic.hpp"
#include "cuspec/operators.hpp"

namespace cuspec {

struct GraphDocument {
    WeightedGraph graph;
    MagneticPotential theta;
};

/// {"vertices":[{"id","m"}], "edges":[{"u","v","weight","theta","theta_rat":[p,q]}]}.
/// "theta" is in radians; "theta_rat" means 2 pi p/q and wins over "theta".
/// Missing "weight" is 1, missing phase is 0. Schema errors are BadDocument;
/// graph invariants are checked by the graph builder.
GraphDocument parse_graph_document(const std::string& text);
GraphDocument load_graph_document(const std::filesystem::path& path);
std::string graph_document_json(const WeightedGraph& g, const MagneticPotential& theta);

/// Fixed 17-significant-digit formatting used for every CSV cell.
std::string format_double(double v);

void write_spectrum_csv(std::ostream& out, const Eigen::VectorXd& values);
void write_holonomy_csv(std::ostream& out, const WeightedGraph& g, const CycleBasis& basis,
                        std::span<const Phase> holonomies);
void write_asymptotics_csv(std::ostream& out, const AsymptoticsReport& report);
void write_counting_csv(std::ostream& out, std::span<const CountingRow> rows);

/// "CUSPEC01", u32 dimension, u32 count (little endian), then column-major
/// (re, im) doubles.
void write_eigenvector_dump(std::ostream& out, const Eigen::MatrixXcd& vectors);
Eigen::MatrixXcd read_eigenvector_dump(std::istream& in);

}  // namespace cuspec

#endif
