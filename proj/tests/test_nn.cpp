#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "gradcheck.hpp"
#include "wvdnet/checkpoint.hpp"
#include "wvdnet/error.hpp"
#include "wvdnet/fileutil.hpp"
#include "wvdnet/train.hpp"

using namespace wvdnet;
using Catch::Matchers::WithinAbs;
namespace fs = std::filesystem;

namespace {

Tensor<double> t3(std::size_t c, std::size_t h, std::size_t w, std::vector<double> v) {
  return Tensor<double>({c, h, w}, std::move(v));
}

ImageSet random_set(std::size_t n, std::size_t classes, std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  ImageSet s;
  s.rows = rows;
  s.cols = cols;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<float> img(rows * cols);
    const std::size_t label = i % classes;
    // class-dependent bright column plus noise
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c)
        img[r * cols + c] = static_cast<float>(0.2 * rng.uniform() + (c == 2 * label + 1 ? 0.8 : 0.0));
    s.add(img, label);
  }
  return s;
}

}  // namespace

TEST_CASE("conv2d forward examples") {
  const auto y = conv2d_forward(t3(1, 1, 1, {5}), Tensor<double>({1, 1, 1, 1}, {2}), Tensor<double>({1}, {1}), 1, 0);
  CHECK(y.storage() == std::vector<double>{11});
  const auto g = conv2d_backward(Tensor<double>({1, 1, 1}, {1}), t3(1, 1, 1, {5}), Tensor<double>({1, 1, 1, 1}, {2}), 1, 0);
  CHECK(g.grad_weights[0] == 5);
  CHECK(g.grad_bias[0] == 1);
  CHECK(g.grad_input[0] == 2);

  Rng rng(2);
  Tensor<double> x({1, 5, 6});
  for (auto& v : x.values()) v = rng.normal();
  Tensor<double> id({1, 1, 3, 3}, 0.0);
  id[4] = 1.0;
  CHECK(conv2d_forward(x, id, Tensor<double>({1}, 0.0), 1, 1).storage() == x.storage());

  const auto ones = conv2d_forward(t3(1, 3, 3, std::vector<double>(9, 1.0)), Tensor<double>({1, 1, 3, 3}, 1.0),
                                   Tensor<double>({1}, 0.0), 1, 1);
  CHECK(ones.storage() == std::vector<double>{4, 6, 4, 6, 9, 6, 4, 6, 4});

  CHECK_THROWS_AS(conv2d_forward(t3(2, 3, 3, std::vector<double>(18, 1.0)), Tensor<double>({1, 1, 3, 3}, 1.0),
                                 Tensor<double>({1}, 0.0), 1, 1),
                  InvalidArgument);
}

TEST_CASE("conv2d matches the nested-loop oracle") {
  Rng rng(8);
  for (auto [c, o, h, w, k, s, p] : {std::tuple{2u, 3u, 7u, 6u, 3u, 1u, 1u}, std::tuple{3u, 2u, 8u, 8u, 2u, 2u, 0u},
                                     std::tuple{1u, 4u, 5u, 9u, 3u, 1u, 0u}, std::tuple{16u, 8u, 12u, 12u, 3u, 1u, 1u}}) {
    Tensor<double> x({c, h, w}), wt({o, c, k, k}), b({o});
    for (auto& v : x.values()) v = rng.normal();
    for (auto& v : wt.values()) v = rng.normal();
    for (auto& v : b.values()) v = rng.normal();
    const auto want = oracle::conv2d(x.storage(), c, h, w, wt.storage(), b.storage(), o, k, s, p);
    for (auto backend : {kernels::Backend::serial, kernels::Backend::omp}) {
      const auto got = conv2d_forward(x, wt, b, s, p, backend);
      CHECK(oracle::max_rel_error(got.storage(), want) < 1e-12);
    }
  }
}

TEST_CASE("maxpool") {
  const auto r = maxpool2d_forward(t3(1, 2, 2, {1, 2, 3, 4}));
  CHECK(r.output.storage() == std::vector<double>{4});
  const auto odd = maxpool2d_forward(Tensor<double>({1, 5, 5}, 1.0));
  CHECK(odd.output.shape() == Shape{1, 2, 2});

  const auto flat = maxpool2d_forward(Tensor<double>({1, 2, 2}, 7.0));
  const auto back = maxpool2d_backward(Tensor<double>({1, 1, 1}, {3.0}), flat.argmax, {1, 2, 2});
  CHECK(back.storage() == std::vector<double>{3, 0, 0, 0});

  Shape s{1, 300, 300};
  for (int i = 0; i < 3; ++i) s = layer_output_shape(LayerSpec::maxpool2d(2, 2), s);
  CHECK(s == Shape{1, 37, 37});
}

TEST_CASE("elementwise layers and loss") {
  const Tensor<double> x({3}, {-1, 0, 2});
  CHECK(relu_forward(x).storage() == std::vector<double>{0, 0, 2});
  CHECK(relu_backward(Tensor<double>({3}, 1.0), x).storage() == std::vector<double>{0, 0, 1});

  Rng rng(1);
  for (bool train : {true, false}) {
    const auto d = dropout_forward(x, 0.0, train, rng);
    CHECK(d.output.storage() == x.storage());
  }
  const auto ev = dropout_forward(x, 0.5, false, rng);
  CHECK(ev.output.storage() == x.storage());
  const auto tr = dropout_forward(Tensor<double>({10000}, 1.0), 0.25, true, rng);
  std::size_t kept = 0;
  for (double v : tr.output.values()) {
    CHECK((v == 0.0 || std::abs(v - 1.0 / 0.75) < 1e-15));
    kept += v != 0.0;
  }
  CHECK(std::abs(static_cast<double>(kept) / 10000 - 0.75) < 0.02);

  const std::vector<double> equal(10, 0.3);
  CHECK_THAT(softmax_cross_entropy<double>(equal, 4).loss, WithinAbs(std::log(10.0), 1e-12));
  const std::vector<double> big{1000, 0};
  const auto stable = softmax_cross_entropy<double>(big, 0);
  CHECK(std::isfinite(stable.loss));
  CHECK(stable.loss < 1e-12);
  CHECK_THROWS_AS(softmax_cross_entropy<double>(big, 2), InvalidArgument);

  std::vector<double> z{0.3, -1.2, 2.0, 0.7};
  const auto ce = softmax_cross_entropy<double>(z, 2);
  const auto num = oracle::numeric_gradient(z, [&]() { return softmax_cross_entropy<double>(z, 2).loss; });
  CHECK(oracle::max_rel_error(ce.grad_logits, num) < 1e-6);
}

TEST_CASE("layer gradients match finite differences") {
  for (const auto& c : gradcheck::layer_cases()) {
    INFO(c.name);
    const auto r = gradcheck::check_layer(c.spec, c.batch_shape, 42);
    CHECK(r.input_error < 1e-4);
    CHECK(r.param_error < 1e-4);
  }
}

TEST_CASE("single-sample linear gradients") {
  Rng rng(3);
  Tensor<double> x({6}), w({4, 6}), b({4}), R({4});
  for (auto* t : {&x, &w, &b, &R})
    for (auto& v : t->values()) v = rng.normal();
  const auto g = linear_backward(R, x, w);
  auto loss = [&]() { return gradcheck::dot(linear_forward(x, w, b), R); };
  std::vector<double> wv = w.storage();
  const auto num = oracle::numeric_gradient(wv, [&]() {
    w.storage() = wv;
    return loss();
  });
  w.storage() = wv;
  CHECK(oracle::max_rel_error(g.grad_weights.storage(), num) < 1e-4);
  CHECK(oracle::max_rel_error(g.grad_bias.storage(), R.storage()) < 1e-12);
}

TEST_CASE("whole-network gradient") {
  const auto r = gradcheck::check_network(gradcheck::tiny_reference(), 3, 5);
  CHECK(r.input_error < 1e-4);
  CHECK(r.param_error < 1e-4);
}

TEST_CASE("reference architecture") {
  const NetworkConfig cfg = reference_config();
  const auto chain = shape_chain(cfg);
  CHECK(chain[9] == Shape{64, 37, 37});
  CHECK(chain[10] == Shape{87616});
  CHECK(cfg.layers[11] == LayerSpec::linear(87616, 500));
  CHECK(chain.back() == Shape{10});
  const std::string text = describe(cfg);
  CHECK(text.find("Conv2d(1, 16, kernel_size=(3, 3), stride=(1, 1), padding=(1, 1))") != std::string::npos);
  CHECK(text.find("MaxPool2d(kernel_size=2, stride=2, padding=0, dilation=1, ceil_mode=False)") != std::string::npos);
  CHECK(text.find("Linear(in_features=87616, out_features=500, bias=True)") != std::string::npos);
  CHECK(text.find("Dropout(p=0.25, inplace=False)") != std::string::npos);

  ReferenceOptions half;
  half.rows = half.cols = 150;
  half.num_classes = 3;
  CHECK(shape_chain(reference_config(half))[10] == Shape{20736});

  NetworkConfig bad = cfg;
  bad.layers.pop_back();
  CHECK_THROWS_AS(shape_chain(bad), InvalidArgument);
}

TEST_CASE("network init and predict") {
  NetworkConfig cfg = gradcheck::tiny_reference(4);
  Network<float> a(cfg), b(cfg);
  CHECK(serialize_checkpoint(a) == serialize_checkpoint(b));
  for (auto& p : a.params()) {
    if (p.name.find("bias") != std::string::npos) {
      for (float v : p.value->values()) CHECK(v == 0.0f);
    }
  }

  Tensor<float> img({1, 8, 8}, 0.5f);
  const Prediction p = predict(a, img);
  CHECK_THAT(std::accumulate(p.probabilities.begin(), p.probabilities.end(), 0.0), WithinAbs(1.0, 1e-9));

  auto params = a.params();
  for (auto& v : params.back().value->values()) v = 0;       // final bias
  for (auto& v : params[params.size() - 2].value->values()) v = 0;  // final weight
  const Prediction u = predict(a, img);
  for (double q : u.probabilities) CHECK_THAT(q, WithinAbs(0.25, 1e-12));
  CHECK(u.class_index == 0);
  CHECK(argmax_lowest(std::vector<double>{1, 3, 3, 2}) == 1);

  CHECK_THROWS_AS(predict(a, Tensor<float>({1, 9, 8}, 0.f)), InvalidArgument);
}

TEST_CASE("checkpoint round trip and rejection") {
  NetworkConfig cfg = gradcheck::tiny_reference(3);
  cfg.class_names = {"a", "bee", "sea"};
  Network<float> net(cfg);
  const std::string bytes = serialize_checkpoint(net);
  CHECK(bytes.substr(0, 4) == "WVDN");
  Network<float> back = deserialize_checkpoint(bytes);
  CHECK(back.config() == cfg);
  CHECK(serialize_checkpoint(back) == bytes);

  const fs::path path = fs::temp_directory_path() / "wvdnet_test.wvdn";
  save_checkpoint(net, path);
  CHECK(read_file(path) == bytes);
  fs::remove(path);

  std::string v2 = bytes;
  v2[4] = 2;
  CHECK_THROWS_AS(deserialize_checkpoint(v2), DataError);
  std::string magic = bytes;
  magic[0] = 'X';
  CHECK_THROWS_AS(deserialize_checkpoint(magic), DataError);
  CHECK_THROWS_AS(deserialize_checkpoint(bytes.substr(0, bytes.size() - 1)), DataError);
  CHECK_THROWS_AS(deserialize_checkpoint(bytes + "x"), DataError);
}

TEST_CASE("training") {
  const NetworkConfig cfg = gradcheck::tiny_reference(3);
  const ImageSet data = random_set(12, 3, 8, 8, 4);

  TrainConfig frozen;
  frozen.epochs = 3;
  frozen.batch_size = 4;
  frozen.learning_rate = 0.0;
  Network<float> init(cfg);
  TrainResult f = train(cfg, data, {}, frozen);
  CHECK(serialize_checkpoint(f.final_net) == serialize_checkpoint(init));
  CHECK(f.history.size() == 3);

  TrainConfig none = frozen;
  none.epochs = 0;
  const TrainResult z = train(cfg, data, data, none);
  CHECK(z.history.empty());
  CHECK(z.best_epoch == 0);

  ImageSet one;
  one.rows = one.cols = 8;
  one.add(data.image(0), data.labels[0]);
  TrainConfig mem;
  mem.epochs = 200;
  mem.batch_size = 1;
  mem.learning_rate = 0.01;
  mem.seed = 9;
  const TrainResult m = train(cfg, one, {}, mem);
  CHECK(m.history.back().train_loss < 0.01);

  TrainConfig det;
  det.epochs = 4;
  det.batch_size = 5;
  det.learning_rate = 0.05;
  det.seed = 21;
  TrainResult r1 = train(cfg, data, data, det);
  TrainResult r2 = train(cfg, data, data, det);
  CHECK(serialize_checkpoint(r1.final_net) == serialize_checkpoint(r2.final_net));
  CHECK(serialize_checkpoint(r1.best) == serialize_checkpoint(r2.best));
  for (std::size_t i = 0; i < r1.history.size(); ++i) {
    CHECK(r1.history[i].train_loss == r2.history[i].train_loss);
    CHECK(r1.history[i].eval_accuracy == r2.history[i].eval_accuracy);
  }
  TrainResult serial = train(cfg, data, data, det, kernels::Backend::serial);
  CHECK(serialize_checkpoint(serial.final_net) == serialize_checkpoint(r1.final_net));

  ImageSet bad = data;
  bad.labels[0] = 7;
  CHECK_THROWS_AS(train(cfg, bad, {}, det), InvalidArgument);
  CHECK_THROWS_AS(train(cfg, ImageSet{}, {}, det), InvalidArgument);
}

TEST_CASE("one small SGD step lowers the batch loss") {
  NetworkConfig cfg = gradcheck::tiny_reference(3);
  for (auto& l : cfg.layers) {
    if (l.kind == LayerKind::dropout) l.p = 0.0;
  }
  Network<double> net(cfg);
  const ImageSet data = random_set(6, 3, 8, 8, 12);
  std::vector<std::size_t> idx(6);
  std::iota(idx.begin(), idx.end(), 0);
  const auto batch = gather_batch<double>(data, idx);
  const double before = mean_loss(net, batch, data.labels);
  Rng rng(0);
  net.zero_grad();
  forward_backward(net, batch, data.labels, true, rng);
  Sgd<double>(1e-5, 0.9).step(net);
  CHECK(mean_loss(net, batch, data.labels) < before);
}
