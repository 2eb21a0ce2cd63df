#!/usr/bin/env python
# _*_ coding:utf-8 _*_
import json
import logging
import math

from sewflow.almostflow import SamplerSpec, validate_almost_flow
from sewflow.builtins import integral_functional, linear_path, scalar_exponential_field, sine_path
from sewflow.schemes import additive_flow, lift_smooth, signature, young_flow
from sewflow.sewing import SewSchedule, sew
from sewflow.solutions import davie_defect, flow_to_solution
from sewflow.timegrid import uniform_partition

logging.basicConfig(level=logging.INFO)

END_PAIRS = SamplerSpec(pairs=[[0.0, 1.0], [0.25, 0.75]], states=[[1.0]])


def main():
    # 1、additive sewing: int_0^1 x dx along x_t = t
    phi = additive_flow(integral_functional(linear_path()))
    approx = sew(phi, SewSchedule(max_levels=12, tolerance=2.5e-4,
                                  sampler=SamplerSpec(pairs=END_PAIRS.pairs(1.0), states=[[0.0]])))
    print('Sewn integral after %s levels: %s' % (len(approx.history) - 1, approx.evaluate(0.0, 1.0, [0.0])))

    # 2、Young differential equation dy = y dsin(t), y_0 = 1
    phi = young_flow(scalar_exponential_field(), sine_path())
    report = validate_almost_flow(phi, SamplerSpec(seed=7))
    print('Almost flow validation:\n%s' % json.dumps(report.to_dict(), indent=2, separators=(',', ': ')))
    approx = sew(phi, SewSchedule(max_levels=16, tolerance=2e-5, sampler=END_PAIRS), check='warn')
    y = flow_to_solution(approx, 0.0, [1.0], uniform_partition(1.0, 16))
    print('y_1 = %s, exact %s' % (y.value_at(1.0)[0], math.exp(math.sin(1.0))))
    print('Davie defect: %s' % json.dumps(davie_defect(y, phi).to_dict(), indent=2, separators=(',', ': ')))

    # 3、level-3 signature of a straight line
    result = signature(lift_smooth(linear_path((1.0, 2.0)), quad_refine=8), 3, tolerance=1e-10)
    print('Signature level 2 block:\n%s' % result.block(2))

    print('Finished samples, Congratulations!')


if __name__ == '__main__':
    main()
