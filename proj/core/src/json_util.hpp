#pragma once

// Private helpers shared by the JSON readers and writers.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "affinelens/errors.hpp"

namespace affinelens::detail {

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ParseError("cannot write " + path.string());
    out << content;
}

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key, const std::string& where)
{
    auto it = obj.find(key);
    if (it == obj.end())
        throw ParseError(where + ": missing field \"" + key + "\"");
    return *it;
}

inline double read_number(const nlohmann::json& v, const std::string& where)
{
    if (!v.is_number())
        throw ParseError(where + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x))
        throw ParseError(where + ": non-finite value");
    return x;
}

inline int require_int(const nlohmann::json& obj, const char* key, const std::string& where)
{
    const auto& v = require(obj, key, where);
    if (!v.is_number_integer())
        throw ParseError(where + ": \"" + key + "\" must be an integer");
    return v.get<int>();
}

inline Eigen::VectorXd read_vector(const nlohmann::json& v, const std::string& where)
{
    if (!v.is_array())
        throw ParseError(where + ": expected an array");
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
        out(static_cast<Eigen::Index>(i)) = read_number(v[i], where);
    return out;
}

inline Eigen::MatrixXd read_matrix(const nlohmann::json& v, const std::string& where)
{
    if (!v.is_array())
        throw ParseError(where + ": expected an array of rows");
    if (v.empty())
        return Eigen::MatrixXd(0, 0);
    if (!v[0].is_array())
        throw ParseError(where + ": expected an array of rows");
    const std::size_t cols = v[0].size();
    Eigen::MatrixXd out(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_array() || v[i].size() != cols)
            throw ParseError(where + ": row " + std::to_string(i) + " has the wrong length");
        for (std::size_t j = 0; j < cols; ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = read_number(v[i][j], where);
    }
    return out;
}

inline nlohmann::json vector_to_json(const Eigen::VectorXd& v)
{
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        a.push_back(v(i));
    return a;
}

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m)
{
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        a.push_back(vector_to_json(m.row(i).transpose()));
    return a;
}

} // namespace affinelens::detail
