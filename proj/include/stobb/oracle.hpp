#pragma once

#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "stobb/common.hpp"

namespace stobb {

// The fixed classifier f: R^d -> C. Immutable after construction.
class BlackBoxModel {
  public:
    virtual ~BlackBoxModel() = default;
    virtual ClassId predict(const Vector& x) const = 0;
    virtual std::size_t input_dim() const = 0;
    virtual int num_classes() const = 0;

    std::vector<ClassId> predict_batch(const std::vector<Vector>& xs) const {
        std::vector<ClassId> out;
        out.reserve(xs.size());
        for (const Vector& x : xs) out.push_back(predict(x));
        return out;
    }
};

// Feedforward ReLU network loaded from a plain text weights file.
// ReLU between hidden layers, argmax over output logits (ties to lowest
// class index).
class NetworkModel final : public BlackBoxModel {
  public:
    struct Layer {
        std::size_t in = 0, out = 0;
        std::vector<double> weights;  // row-major, out rows of in columns
        std::vector<double> bias;
    };

    NetworkModel(std::size_t input_dim, int classes, std::vector<Layer> layers)
        : input_dim_(input_dim), classes_(classes), layers_(std::move(layers)) {
        std::size_t dim = input_dim_;
        for (const Layer& l : layers_) {
            if (l.in != dim || l.weights.size() != l.in * l.out || l.bias.size() != l.out)
                throw ContractViolation("NetworkModel: layer shapes do not chain");
            dim = l.out;
        }
        if (dim != static_cast<std::size_t>(classes_))
            throw ContractViolation("NetworkModel: output dimension != number of classes");
    }

    std::size_t input_dim() const override { return input_dim_; }
    int num_classes() const override { return classes_; }
    const std::vector<Layer>& layers() const { return layers_; }

    Vector logits(const Vector& x) const {
        if (x.size() != input_dim_)
            throw ContractViolation("predict: input dimension mismatch");
        Vector cur = x, next;
        for (std::size_t li = 0; li < layers_.size(); ++li) {
            const Layer& l = layers_[li];
            next.assign(l.out, 0.0);
            for (std::size_t r = 0; r < l.out; ++r) {
                const double* w = l.weights.data() + r * l.in;
                double acc = l.bias[r];
                for (std::size_t c = 0; c < l.in; ++c) acc += w[c] * cur[c];
                next[r] = acc;
            }
            if (li + 1 < layers_.size())
                for (double& v : next)
                    if (v < 0) v = 0;
            cur.swap(next);
        }
        return cur;
    }

    ClassId predict(const Vector& x) const override {
        Vector z = logits(x);
        std::size_t best = 0;
        for (std::size_t i = 1; i < z.size(); ++i)
            if (z[i] > z[best]) best = i;
        return static_cast<ClassId>(best);
    }

    static NetworkModel load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open weights file: " + path);
        std::string tok, version;
        in >> tok >> version;
        if (tok != "stobb-weights" || version != "v1")
            throw IoError("weights file: unexpected header '" + tok + " " + version + "'");
        std::size_t input_dim = 0, n_layers = 0;
        int classes = 0;
        expect(in, "input_dim");
        in >> input_dim;
        expect(in, "classes");
        in >> classes;
        expect(in, "layers");
        in >> n_layers;
        std::vector<Layer> layers(n_layers);
        for (std::size_t li = 0; li < n_layers; ++li) {
            expect(in, "layer");
            std::size_t idx;
            in >> idx;
            Layer& l = layers[li];
            in >> l.in >> l.out;
            l.weights.resize(l.in * l.out);
            l.bias.resize(l.out);
            for (double& w : l.weights)
                if (!(in >> w)) throw IoError("weights file: truncated weight matrix");
            for (double& b : l.bias)
                if (!(in >> b)) throw IoError("weights file: truncated bias vector");
        }
        return NetworkModel(input_dim, classes, std::move(layers));
    }

    void save(std::ostream& out) const {
        out << "stobb-weights v1\n";
        out << "input_dim " << input_dim_ << "\n";
        out << "classes " << classes_ << "\n";
        out << "layers " << layers_.size() << "\n";
        for (std::size_t li = 0; li < layers_.size(); ++li) {
            const Layer& l = layers_[li];
            out << "layer " << li << " " << l.in << " " << l.out << "\n";
            for (std::size_t r = 0; r < l.out; ++r) {
                for (std::size_t c = 0; c < l.in; ++c) {
                    if (c) out << " ";
                    out << format_double(l.weights[r * l.in + c]);
                }
                out << "\n";
            }
            for (std::size_t r = 0; r < l.out; ++r) {
                if (r) out << " ";
                out << format_double(l.bias[r]);
            }
            out << "\n";
        }
    }

  private:
    static void expect(std::istream& in, const std::string& key) {
        std::string tok;
        in >> tok;
        if (tok != key) throw IoError("weights file: expected '" + key + "', got '" + tok + "'");
    }

    std::size_t input_dim_;
    int classes_;
    std::vector<Layer> layers_;
};

// Exact lookup table, primarily for tests and synthetic fixtures.
class LookupModel final : public BlackBoxModel {
  public:
    LookupModel(std::size_t input_dim, int classes) : input_dim_(input_dim), classes_(classes) {}

    void insert(Vector x, ClassId c) {
        if (x.size() != input_dim_)
            throw ContractViolation("lookup insert: input dimension mismatch");
        table_[std::move(x)] = c;
    }

    std::size_t input_dim() const override { return input_dim_; }
    int num_classes() const override { return classes_; }

    ClassId predict(const Vector& x) const override {
        if (x.size() != input_dim_)
            throw ContractViolation("predict: input dimension mismatch");
        auto it = table_.find(x);
        if (it == table_.end())
            throw std::runtime_error("input vector not covered by lookup oracle");
        return it->second;
    }

    // CSV lines "f1,...,fd,label", d inferred from the first line.
    static LookupModel load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open lookup file: " + path);
        std::vector<std::pair<Vector, ClassId>> rows;
        std::string line;
        int max_class = -1;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::vector<std::string> cells;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) cells.push_back(cell);
            if (cells.size() < 2) throw IoError("lookup file: row with fewer than 2 columns");
            Vector x;
            for (std::size_t i = 0; i + 1 < cells.size(); ++i) x.push_back(parse_double(cells[i]));
            ClassId c = static_cast<ClassId>(parse_double(cells.back()));
            max_class = std::max(max_class, c);
            rows.emplace_back(std::move(x), c);
        }
        if (rows.empty()) throw IoError("lookup file is empty: " + path);
        LookupModel m(rows[0].first.size(), max_class + 1);
        for (auto& [x, c] : rows) {
            if (x.size() != m.input_dim_) throw IoError("lookup file: inconsistent row width");
            m.insert(std::move(x), c);
        }
        return m;
    }

  private:
    std::size_t input_dim_;
    int classes_;
    std::map<Vector, ClassId> table_;
};

}  // namespace stobb
