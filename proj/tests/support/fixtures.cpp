#include "fixtures.hpp"

#include <cmath>
#include <filesystem>
#include <regex>
#include <sstream>

namespace affinelens::testing {

namespace {

Eigen::MatrixXd uniform_matrix(std::mt19937_64& rng, int rows, int cols, double h)
{
    std::uniform_real_distribution<double> u(-h, h);
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            m(i, j) = u(rng);
    return m;
}

Eigen::VectorXd uniform_vector(std::mt19937_64& rng, int n, double h)
{
    return uniform_matrix(rng, n, 1, h).col(0);
}

} // namespace

Network random_mlp(int input_dim, const std::vector<int>& widths, int output_dim, std::uint64_t seed,
                   double negative_slope)
{
    std::mt19937_64 rng(seed);
    std::vector<LayerSpec> layers;
    int in = input_dim;
    for (int w : widths) {
        layers.push_back(LayerSpec::dense(uniform_matrix(rng, w, in, 1.0), uniform_vector(rng, w, 0.5)));
        layers.push_back(LayerSpec::activation(1.0, negative_slope));
        in = w;
    }
    layers.push_back(LayerSpec::dense(uniform_matrix(rng, output_dim, in, 1.0), uniform_vector(rng, output_dim, 0.5)));
    return Network(input_dim, std::move(layers));
}

Network residual_batchnorm_net()
{
    std::mt19937_64 rng(20240611);
    std::vector<LayerSpec> layers;
    layers.push_back(LayerSpec::dense(uniform_matrix(rng, 4, 2, 1.0), uniform_vector(rng, 4, 0.4)));
    layers.push_back(LayerSpec::relu());

    layers.push_back(LayerSpec::residual_begin());
    layers.push_back(LayerSpec::dense(uniform_matrix(rng, 4, 4, 1.0), uniform_vector(rng, 4, 0.4)));
    Eigen::VectorXd scale(4), shift(4);
    scale << 1.3, 0.7, 1.1, 0.9;
    shift << 0.05, -0.1, 0.2, -0.15;
    layers.push_back(LayerSpec::batchnorm(scale, shift));
    layers.push_back(LayerSpec::relu());
    layers.push_back(LayerSpec::dense(uniform_matrix(rng, 4, 4, 0.8), uniform_vector(rng, 4, 0.3)));
    layers.push_back(LayerSpec::residual_end());

    layers.push_back(LayerSpec::residual_begin());
    layers.push_back(LayerSpec::dense(uniform_matrix(rng, 4, 4, 1.0), uniform_vector(rng, 4, 0.4)));
    layers.push_back(LayerSpec::leaky_relu(0.1));
    layers.push_back(LayerSpec::dense(uniform_matrix(rng, 4, 4, 0.8), uniform_vector(rng, 4, 0.3)));
    layers.push_back(LayerSpec::residual_end());

    layers.push_back(LayerSpec::dense(uniform_matrix(rng, 3, 4, 1.0), uniform_vector(rng, 3, 0.3)));
    return Network(2, std::move(layers));
}

std::vector<Hyperplane> random_lines(int count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, M_PI);
    std::uniform_real_distribution<double> off(-0.3, 0.3);
    for (;;) {
        std::vector<Hyperplane> lines;
        for (int i = 0; i < count; ++i) {
            const double t = angle(rng);
            Eigen::Vector2d n(std::cos(t), std::sin(t));
            lines.push_back(Hyperplane{n, off(rng)});
        }
        // General position: no two parallel, all crossings strictly inside the box, no triple points.
        bool ok = true;
        std::vector<Eigen::Vector2d> crossings;
        for (int i = 0; i < count && ok; ++i)
            for (int j = i + 1; j < count && ok; ++j) {
                Eigen::Matrix2d M;
                M << lines[i].normal.transpose(), lines[j].normal.transpose();
                if (std::abs(M.determinant()) < 0.2) {
                    ok = false;
                    break;
                }
                const Eigen::Vector2d p = M.partialPivLu().solve(Eigen::Vector2d(-lines[i].offset, -lines[j].offset));
                if (p.cwiseAbs().maxCoeff() > 0.9)
                    ok = false;
                crossings.push_back(p);
            }
        for (std::size_t i = 0; i < crossings.size() && ok; ++i)
            for (std::size_t j = i + 1; j < crossings.size() && ok; ++j)
                if ((crossings[i] - crossings[j]).norm() < 1e-3)
                    ok = false;
        if (ok)
            return lines;
    }
}

Eigen::VectorXd uniform_point(std::mt19937_64& rng, int d, double lo, double hi)
{
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::VectorXd x(d);
    for (int i = 0; i < d; ++i)
        x(i) = u(rng);
    return x;
}

Eigen::VectorXd interior_point(std::mt19937_64& rng, const Eigen::VectorXd& center, double radius, double fraction)
{
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::VectorXd dir(center.size());
    for (Eigen::Index i = 0; i < dir.size(); ++i)
        dir(i) = g(rng);
    dir.normalize();
    return center + dir * radius * fraction * u(rng);
}

bool close_relative(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol)
{
    if (a.size() != b.size())
        return false;
    for (Eigen::Index i = 0; i < a.size(); ++i)
        if (std::abs(a(i) - b(i)) > tol * std::max(1.0, std::abs(a(i))))
            return false;
    return true;
}

std::uint64_t cell_bound(int m, int d)
{
    std::uint64_t total = 0, c = 1;
    for (int i = 0; i <= std::min(m, d); ++i) {
        total += c;
        c = c * static_cast<std::uint64_t>(m - i) / static_cast<std::uint64_t>(i + 1);
    }
    return total;
}

SvgRegions parse_svg_regions(const std::string& svg)
{
    static const std::regex path(R"re(<path class="region"[^>]* d="([^"]*)")re");
    SvgRegions out;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), path); it != std::sregex_iterator(); ++it) {
        std::istringstream d((*it)[1].str());
        std::vector<std::pair<double, double>> pts;
        std::string tok;
        while (d >> tok && tok != "Z") {
            double x = 0, y = 0;
            d >> x >> y;
            pts.emplace_back(x, y);
        }
        double a = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto& p = pts[i];
            const auto& q = pts[(i + 1) % pts.size()];
            a += p.first * q.second - q.first * p.second;
        }
        out.area += 0.5 * std::abs(a);
        ++out.count;
    }
    return out;
}

std::string scratch_dir(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("affinelens_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

} // namespace affinelens::testing
