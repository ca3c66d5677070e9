#include <fstream>

#include <json.hpp>

#include "refertriage/errors.hpp"
#include "refertriage/model.hpp"

namespace refertriage {

namespace {

using nlohmann::ordered_json;

constexpr const char* kModelSchema = "refertriage.model/1";

ordered_json params_to_json(const ClassifierSpec& spec) {
    switch (spec.kind) {
        case ModelKind::random_forest:
            return {{"n_estimators", spec.forest.n_estimators},
                    {"max_depth", spec.forest.max_depth},
                    {"min_samples_split", spec.forest.min_samples_split},
                    {"min_samples_leaf", spec.forest.min_samples_leaf},
                    {"max_features", spec.forest.max_features},
                    {"bootstrap", spec.forest.bootstrap}};
        case ModelKind::gradient_boosting:
            return {{"n_stages", spec.boost.n_stages},
                    {"max_depth", spec.boost.max_depth},
                    {"learning_rate", spec.boost.learning_rate}};
        case ModelKind::linear_margin:
            return {{"l2", spec.linear.l2}, {"epochs", spec.linear.epochs}};
        case ModelKind::mlp:
            return {{"hidden_units", spec.mlp.hidden_units},
                    {"epochs", spec.mlp.epochs},
                    {"batch_size", spec.mlp.batch_size},
                    {"learning_rate", spec.mlp.learning_rate}};
    }
    return {};
}

void params_from_json(const ordered_json& j, ClassifierSpec& spec) {
    switch (spec.kind) {
        case ModelKind::random_forest:
            spec.forest.n_estimators = j.at("n_estimators").get<size_t>();
            spec.forest.max_depth = j.at("max_depth").get<size_t>();
            spec.forest.min_samples_split = j.at("min_samples_split").get<size_t>();
            spec.forest.min_samples_leaf = j.at("min_samples_leaf").get<size_t>();
            spec.forest.max_features = j.at("max_features").get<size_t>();
            spec.forest.bootstrap = j.at("bootstrap").get<bool>();
            break;
        case ModelKind::gradient_boosting:
            spec.boost.n_stages = j.at("n_stages").get<size_t>();
            spec.boost.max_depth = j.at("max_depth").get<size_t>();
            spec.boost.learning_rate = j.at("learning_rate").get<double>();
            break;
        case ModelKind::linear_margin:
            spec.linear.l2 = j.at("l2").get<double>();
            spec.linear.epochs = j.at("epochs").get<size_t>();
            break;
        case ModelKind::mlp:
            spec.mlp.hidden_units = j.at("hidden_units").get<size_t>();
            spec.mlp.epochs = j.at("epochs").get<size_t>();
            spec.mlp.batch_size = j.at("batch_size").get<size_t>();
            spec.mlp.learning_rate = j.at("learning_rate").get<double>();
            break;
    }
}

ordered_json trees_to_json(const std::vector<DecisionTree>& trees) {
    ordered_json arr = ordered_json::array();
    for (const DecisionTree& tree : trees) {
        ordered_json nodes = ordered_json::array();
        for (const TreeNode& n : tree.nodes)
            nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
        arr.push_back(std::move(nodes));
    }
    return arr;
}

std::vector<DecisionTree> trees_from_json(const ordered_json& arr) {
    std::vector<DecisionTree> trees;
    trees.reserve(arr.size());
    for (const auto& jt : arr) {
        DecisionTree tree;
        tree.nodes.reserve(jt.size());
        for (const auto& jn : jt) {
            TreeNode n;
            n.feature = jn.at(0).get<int>();
            n.threshold = jn.at(1).get<double>();
            n.left = jn.at(2).get<int>();
            n.right = jn.at(3).get<int>();
            n.value = jn.at(4).get<double>();
            tree.nodes.push_back(n);
        }
        trees.push_back(std::move(tree));
    }
    return trees;
}

} // namespace

void save_model(const std::string& path, const TrainedClassifier& model) {
    ordered_json j;
    j["schema"] = kModelSchema;
    j["kind"] = to_string(model.kind);
    j["feature_dim"] = model.feature_dim;
    j["seed"] = model.spec.seed;
    j["params"] = params_to_json(model.spec);

    ordered_json state;
    switch (model.kind) {
        case ModelKind::random_forest:
            state["trees"] = trees_to_json(model.trees);
            break;
        case ModelKind::gradient_boosting:
            state["prior"] = model.boost_prior;
            state["stages"] = trees_to_json(model.stages);
            break;
        case ModelKind::linear_margin:
            state["weights"] = model.weights;
            state["bias"] = model.bias;
            break;
        case ModelKind::mlp:
            state["net"] = model.net;
            break;
    }
    j["state"] = std::move(state);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw DataError("write failed: " + path);
}

TrainedClassifier load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    ordered_json j = ordered_json::parse(in, nullptr, false);
    if (j.is_discarded()) throw DataError("model file is not valid JSON: " + path);
    if (j.value("schema", "") != kModelSchema)
        throw DataError("unsupported model schema in " + path);

    TrainedClassifier model;
    model.kind = model_kind_from_string(j.at("kind").get<std::string>());
    model.feature_dim = j.at("feature_dim").get<size_t>();
    model.spec.kind = model.kind;
    model.spec.seed = j.at("seed").get<uint64_t>();
    params_from_json(j.at("params"), model.spec);

    const auto& state = j.at("state");
    switch (model.kind) {
        case ModelKind::random_forest:
            model.trees = trees_from_json(state.at("trees"));
            break;
        case ModelKind::gradient_boosting:
            model.boost_prior = state.at("prior").get<double>();
            model.stages = trees_from_json(state.at("stages"));
            break;
        case ModelKind::linear_margin:
            model.weights = state.at("weights").get<std::vector<double>>();
            model.bias = state.at("bias").get<double>();
            break;
        case ModelKind::mlp:
            model.net = state.at("net").get<std::vector<double>>();
            break;
    }
    return model;
}

} // namespace refertriage
