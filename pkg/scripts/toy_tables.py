"""Print the toy-example set memberships and warm-start iteration counts."""
from warmcg.congen import constraint_generation, identify_invariant_set
from warmcg.instances import gen_toy
from warmcg.learner import LabelMatrix, fit

ROW_NAMES = ["x<=1.5", "y<=1.75", "x>=0.5", "x+y>=b", "y>=0", "y<=2.25"]


def names(ids):
    return "{" + ", ".join(ROW_NAMES[j] for j in sorted(ids)) + "}"


def main():
    train, test = gen_toy()
    idents = [identify_invariant_set(inst) for inst in train]
    print("b      B                          S")
    for inst, ident in zip(train, idents):
        print(f"{inst.theta[0]:<6} {names(ident.binding.ids):<26} {names(ident.invariant.ids)}")
    print()
    print(f"test b = {test.theta[0]}")
    print("learner    k  warm start                          final set                    I")
    for source in ("binding", "invariant"):
        labels = LabelMatrix.from_sets(train, [getattr(i, source) for i in idents], source)
        for k in (1, 2, 3):
            warm = fit(labels, k).predict_set(test.theta, test)
            trace = constraint_generation(test, warm)
            tag = "B" if source == "binding" else "S"
            print(f"{tag}-learner  {k}  {names(warm.ids):<35} {names(trace.final.ids):<28} "
                  f"{trace.iterations}")
    print(f"optimum {trace.outcome.solution.tolist()} objective {trace.objective}")


if __name__ == "__main__":
    main()
