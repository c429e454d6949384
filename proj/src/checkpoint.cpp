#include "cfmec/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace cfmec::rl {

namespace {

std::string fmt(float v)
{
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

template <class Derived>
void write_tensor(std::ostream& os, const std::string& name, const Eigen::MatrixBase<Derived>& m)
{
    os << "tensor " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            os << (c ? " " : "") << fmt(m(r, c));
        os << '\n';
    }
}

[[noreturn]] void bad(const std::filesystem::path& path, const std::string& what)
{
    throw std::runtime_error("checkpoint " + path.string() + ": " + what);
}

float parse_float(const std::string& tok, const std::filesystem::path& path)
{
    float v = 0.0f;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        bad(path, "malformed value '" + tok + "'");
    return v;
}

Mat<float> read_tensor(std::istream& is, const std::string& expected, Eigen::Index rows,
                       Eigen::Index cols, const std::filesystem::path& path)
{
    std::string kw, name;
    Eigen::Index r = 0, c = 0;
    if (!(is >> kw >> name >> r >> c) || kw != "tensor")
        bad(path, "expected tensor header for " + expected);
    if (name != expected || r != rows || c != cols)
        bad(path, "tensor " + name + " does not match the declared layer sizes");
    Mat<float> m(rows, cols);
    std::string tok;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
            if (!(is >> tok))
                bad(path, "truncated tensor " + name);
            m(i, j) = parse_float(tok, path);
        }
    return m;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const std::string& name,
                     const MlpParams<float>& params)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot write checkpoint " + path.string());
    os << "cfmec-mlp " << kCheckpointVersion << '\n';
    os << "name " << name << '\n';
    os << "output " << (params.output == OutputActivation::sigmoid ? "sigmoid" : "identity") << '\n';
    os << "sizes";
    for (int s : params.sizes())
        os << ' ' << s;
    os << '\n';
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        write_tensor(os, "weight_" + std::to_string(i), params.layers[i].weight);
        write_tensor(os, "bias_" + std::to_string(i), params.layers[i].bias);
    }
    os << "end\n";
    if (!os.flush())
        throw std::runtime_error("failed writing checkpoint " + path.string());
}

NamedMlp load_checkpoint(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open checkpoint " + path.string());
    std::string magic, kw, line;
    int version = 0;
    if (!(is >> magic >> version) || magic != "cfmec-mlp")
        bad(path, "not a checkpoint file");
    if (version != kCheckpointVersion)
        bad(path, "unsupported version " + std::to_string(version));

    NamedMlp out;
    std::string act;
    if (!(is >> kw >> out.name) || kw != "name")
        bad(path, "missing name");
    if (!(is >> kw >> act) || kw != "output")
        bad(path, "missing output activation");
    if (act == "sigmoid")
        out.params.output = OutputActivation::sigmoid;
    else if (act == "identity")
        out.params.output = OutputActivation::identity;
    else
        bad(path, "unknown output activation " + act);

    if (!(is >> kw) || kw != "sizes")
        bad(path, "missing layer sizes");
    std::getline(is, line);
    std::istringstream sizes_line(line);
    std::vector<int> sizes;
    for (int s; sizes_line >> s;)
        sizes.push_back(s);
    if (sizes.size() < 2)
        bad(path, "need at least two layer sizes");

    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
        DenseLayer<float> l;
        l.weight = read_tensor(is, "weight_" + std::to_string(i), sizes[i + 1], sizes[i], path);
        l.bias = read_tensor(is, "bias_" + std::to_string(i), sizes[i + 1], 1, path);
        out.params.layers.push_back(std::move(l));
    }
    if (!(is >> kw) || kw != "end")
        bad(path, "missing end marker");
    return out;
}

}  // namespace cfmec::rl
