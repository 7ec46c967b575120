#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "affinelens/errors.hpp"
#include "affinelens/polytope.hpp"
#include "json_util.hpp"

namespace affinelens {

using nlohmann::json;

HPolytope parse_polytope_json(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("polytope: invalid JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw ParseError("polytope: document must be an object");
    const int dim = detail::require_int(doc, "dim", "polytope");
    if (dim <= 0)
        throw ParseError("polytope: \"dim\" must be positive");
    const Eigen::MatrixXd A = detail::read_matrix(detail::require(doc, "A", "polytope"), "polytope.A");
    const Eigen::VectorXd b = detail::read_vector(detail::require(doc, "b", "polytope"), "polytope.b");
    if (A.rows() > 0 && A.cols() != dim)
        throw ParseError("polytope: rows of \"A\" must have length dim=" + std::to_string(dim));
    if (A.rows() != b.size())
        throw ParseError("polytope: \"A\" and \"b\" have different lengths");
    HPolytope p(dim);
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        p.append(Halfspace{A.row(i).transpose(), b(i)});
    return p;
}

HPolytope load_polytope(const std::filesystem::path& path)
{
    return parse_polytope_json(detail::read_file(path));
}

std::string polytope_to_json(const HPolytope& polytope)
{
    json doc;
    doc["dim"] = polytope.dim();
    doc["A"] = detail::matrix_to_json(polytope.A());
    doc["b"] = detail::vector_to_json(polytope.b());
    return doc.dump(2);
}

} // namespace affinelens
