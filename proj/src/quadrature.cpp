#include "nsopt/quadrature.hpp"

#include "nsopt/errors.hpp"

namespace nsopt {

namespace {

QuadratureRule make_rule(int degree) {
  QuadratureRule rule;
  rule.degree = degree;
  auto add = [&rule](double l1, double l2, double l3, double w) {
    rule.points.push_back({l1, l2, l3});
    rule.weights.push_back(w);
  };
  switch (degree) {
    // degree 1: 1 points, max moment residual 0.00e+00
  case 1: {
    add(0.33333333333333331, 0.33333333333333331, 0.33333333333333331, 0.5);
    break; }
    // degree 2: 3 points, max moment residual 1.39e-17
  case 2: {
    add(0.66666666666666674, 0.16666666666666666, 0.16666666666666666, 0.16666666666666666);
    add(0.16666666666666666, 0.66666666666666674, 0.16666666666666666, 0.16666666666666666);
    add(0.16666666666666666, 0.16666666666666666, 0.66666666666666674, 0.16666666666666666);
    break; }
    // degree 3: 4 points, max moment residual 2.78e-17
  case 3: {
    add(0.33333333333333331, 0.33333333333333331, 0.33333333333333331, -0.28125);
    add(0.59999999999999998, 0.20000000000000001, 0.20000000000000001, 0.26041666666666669);
    add(0.20000000000000001, 0.59999999999999998, 0.20000000000000001, 0.26041666666666669);
    add(0.20000000000000001, 0.20000000000000001, 0.59999999999999998, 0.26041666666666669);
    break; }
    // degree 4: 6 points, max moment residual 5.55e-17
  case 4: {
    add(0.10810301816807044, 0.44594849091596478, 0.44594849091596478, 0.11169079483900553);
    add(0.44594849091596478, 0.10810301816807044, 0.44594849091596478, 0.11169079483900553);
    add(0.44594849091596478, 0.44594849091596478, 0.10810301816807044, 0.11169079483900553);
    add(0.81684757298045807, 0.091576213509770993, 0.091576213509770993, 0.05497587182766113);
    add(0.091576213509770993, 0.81684757298045807, 0.091576213509770993, 0.05497587182766113);
    add(0.091576213509770993, 0.091576213509770993, 0.81684757298045807, 0.05497587182766113);
    break; }
    // degree 5: 7 points, max moment residual 2.78e-17
  case 5: {
    add(0.33333333333333331, 0.33333333333333331, 0.33333333333333331, 0.11249999999999773);
    add(0.059715871789771446, 0.47014206410511428, 0.47014206410511428, 0.066197076394253915);
    add(0.47014206410511428, 0.059715871789771446, 0.47014206410511428, 0.066197076394253915);
    add(0.47014206410511428, 0.47014206410511428, 0.059715871789771446, 0.066197076394253915);
    add(0.79742698535308754, 0.10128650732345623, 0.10128650732345623, 0.0629695902724135);
    add(0.10128650732345623, 0.79742698535308754, 0.10128650732345623, 0.0629695902724135);
    add(0.10128650732345623, 0.10128650732345623, 0.79742698535308754, 0.0629695902724135);
    break; }
    // degree 6: 12 points, max moment residual 1.39e-17
  case 6: {
    add(0.50142650965824109, 0.24928674517087943, 0.24928674517087943, 0.058393137863215198);
    add(0.24928674517087943, 0.50142650965824109, 0.24928674517087943, 0.058393137863215198);
    add(0.24928674517087943, 0.24928674517087943, 0.50142650965824109, 0.058393137863215198);
    add(0.87382197101698278, 0.06308901449150861, 0.06308901449150861, 0.025422453185107989);
    add(0.06308901449150861, 0.87382197101698278, 0.06308901449150861, 0.025422453185107989);
    add(0.06308901449150861, 0.06308901449150861, 0.87382197101698278, 0.025422453185107989);
    add(0.31035245103380826, 0.63650249912139589, 0.053145049844795844, 0.041425537809171735);
    add(0.63650249912139589, 0.31035245103380826, 0.053145049844795844, 0.041425537809171735);
    add(0.053145049844795844, 0.31035245103380826, 0.63650249912139589, 0.041425537809171735);
    add(0.31035245103380826, 0.053145049844795844, 0.63650249912139589, 0.041425537809171735);
    add(0.63650249912139589, 0.053145049844795844, 0.31035245103380826, 0.041425537809171735);
    add(0.053145049844795844, 0.63650249912139589, 0.31035245103380826, 0.041425537809171735);
    break; }
    // degree 7: 13 points, max moment residual 2.78e-17
  case 7: {
    add(0.33333333333333331, 0.33333333333333331, 0.33333333333333331, -0.074785022233889137);
    add(0.47930806784191493, 0.26034596607904253, 0.26034596607904253, 0.087807628716624606);
    add(0.26034596607904253, 0.47930806784191493, 0.26034596607904253, 0.087807628716624606);
    add(0.26034596607904253, 0.26034596607904253, 0.47930806784191493, 0.087807628716624606);
    add(0.86973979419556557, 0.065130102902217199, 0.065130102902217199, 0.026673617804420201);
    add(0.065130102902217199, 0.86973979419556557, 0.065130102902217199, 0.026673617804420201);
    add(0.065130102902217199, 0.065130102902217199, 0.86973979419556557, 0.026673617804420201);
    add(0.31286549600487706, 0.63844418856981089, 0.048690315425311992, 0.038556880445125771);
    add(0.63844418856981089, 0.31286549600487706, 0.048690315425311992, 0.038556880445125771);
    add(0.048690315425311992, 0.31286549600487706, 0.63844418856981089, 0.038556880445125771);
    add(0.31286549600487706, 0.048690315425311992, 0.63844418856981089, 0.038556880445125771);
    add(0.63844418856981089, 0.048690315425311992, 0.31286549600487706, 0.038556880445125771);
    add(0.048690315425311992, 0.63844418856981089, 0.31286549600487706, 0.038556880445125771);
    break; }
    // degree 8: 16 points, max moment residual 2.78e-17
  case 8: {
    add(0.33333333333333331, 0.33333333333333331, 0.33333333333333331, 0.072157803838857754);
    add(0.081414823414648896, 0.45929258829267555, 0.45929258829267555, 0.047545817133665784);
    add(0.45929258829267555, 0.081414823414648896, 0.45929258829267555, 0.047545817133665784);
    add(0.45929258829267555, 0.45929258829267555, 0.081414823414648896, 0.047545817133665784);
    add(0.65886138449657627, 0.17056930775171186, 0.17056930775171186, 0.051608685267353821);
    add(0.17056930775171186, 0.65886138449657627, 0.17056930775171186, 0.051608685267353821);
    add(0.17056930775171186, 0.17056930775171186, 0.65886138449657627, 0.051608685267353821);
    add(0.89890554336593953, 0.050547228317030214, 0.050547228317030214, 0.016229248811600646);
    add(0.050547228317030214, 0.89890554336593953, 0.050547228317030214, 0.016229248811600646);
    add(0.050547228317030214, 0.050547228317030214, 0.89890554336593953, 0.016229248811600646);
    add(0.26311282963476951, 0.72849239295531754, 0.0083947774099129013, 0.013615157087213581);
    add(0.72849239295531754, 0.26311282963476951, 0.0083947774099129013, 0.013615157087213581);
    add(0.0083947774099129013, 0.26311282963476951, 0.72849239295531754, 0.013615157087213581);
    add(0.26311282963476951, 0.0083947774099129013, 0.72849239295531754, 0.013615157087213581);
    add(0.72849239295531754, 0.0083947774099129013, 0.26311282963476951, 0.013615157087213581);
    add(0.0083947774099129013, 0.72849239295531754, 0.26311282963476951, 0.013615157087213581);
    break; }
  default:
    throw InputError("quadrature: degree must be in 1..8");
  }
  return rule;
}

}  // namespace

const QuadratureRule& quadrature(int degree) {
  if (degree < 1 || degree > 8) throw InputError("quadrature: degree must be in 1..8");
  static const std::array<QuadratureRule, 8> rules = [] {
    std::array<QuadratureRule, 8> r;
    for (int d = 1; d <= 8; ++d) r[d - 1] = make_rule(d);
    return r;
  }();
  return rules[degree - 1];
}

}  // namespace nsopt
