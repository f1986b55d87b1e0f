#include "lowbias/sample.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lowbias/errors.hpp"

namespace lowbias {

Sample::Sample(Eigen::MatrixXd observations) : obs_(std::move(observations)) {
    if (obs_.rows() < 1 || obs_.cols() < 1)
        throw std::invalid_argument("sample must hold at least one observation");
    if (!obs_.allFinite()) throw std::invalid_argument("sample contains non-finite values");
}

Sample Sample::univariate(Eigen::VectorXd x) {
    Eigen::MatrixXd m(x.size(), 1);
    m.col(0) = x;
    return Sample(std::move(m));
}

Eigen::VectorXd Sample::scalars() const {
    if (dim() != 1) throw std::invalid_argument("scalars() requires a univariate sample");
    return obs_.col(0);
}

MultiSample::MultiSample(std::vector<Sample> samples) : samples_(std::move(samples)) {
    if (samples_.empty()) throw std::invalid_argument("multisample must hold at least one sample");
    min_size_ = samples_[0].size();
    for (const Sample& s : samples_) min_size_ = std::min(min_size_, s.size());
    lambdas_.reserve(samples_.size());
    for (const Sample& s : samples_)
        lambdas_.push_back(static_cast<double>(min_size_) / static_cast<double>(s.size()));
}

namespace {

std::vector<double> parse_line(const std::string& line) {
    std::string cleaned = line;
    std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
    std::istringstream ss(cleaned);
    std::vector<double> row;
    double v = 0;
    while (ss >> v) row.push_back(v);
    if (ss.fail() && !ss.eof()) throw std::invalid_argument("malformed numeric line: " + line);
    return row;
}

}  // namespace

Sample read_sample(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row = parse_line(line);
        if (row.empty()) continue;
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::invalid_argument("inconsistent column count in sample data");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument("invalid sample: no observations");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            m(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
    return Sample(std::move(m));
}

Sample read_sample_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open data file: " + path);
    return read_sample(f);
}

}  // namespace lowbias
