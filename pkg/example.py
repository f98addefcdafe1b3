#!/usr/bin/env python3
"""
Programmatic use of chabauty-nf
"""

from chabauty_nf.engine import ChabautyEngine
from chabauty_nf.models import SolverConfig
from chabauty_nf.problem_io import load_fixture


def run_example():
    """Unit-ball check on Y^2 = X^5 - 3^7 and back-substitution of the descent fixtures"""
    print("🔍 chabauty-nf - example")
    print("=" * 50)

    config = SolverConfig(precision=30, smoothness_bound=75)
    engine = ChabautyEngine(config)
    if not engine.validate_config():
        print("❌ Invalid configuration")
        return

    problem = load_fixture('case_i2')
    print(f"🎯 Problem: {problem.description}")
    print(f"📊 r = {problem.mw.rank}, known points: {len(problem.mw.known_points)}")

    data = engine.run_criterion(problem, 0, 7)
    print(engine.report_generator.generate_criterion_report(data, problem.mw.known_points[0]))

    try:
        candidates, solutions, _ = engine.run_fermat(verify=False)
    except KeyboardInterrupt:
        print("\n🛑 Interrupted")
        return

    print(f"\n✅ {len(candidates)} candidate points, {len(solutions)} solutions")
    for x, y, z in solutions:
        print(f"   {x}^2 + ({y})^3 = ({z})^10")


if __name__ == "__main__":
    run_example()
