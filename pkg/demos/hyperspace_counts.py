"""Sizes of the finite hyperspaces exp(n), G(n) and lambda(n)."""
from multicomm.hyperspace import G_space, exp_space, lambda_space


def main():
    print(" n  exp    G  lambda")
    for n in range(1, 5):
        print(f"{n:>2} {len(exp_space(n)):>4} {len(G_space(n)):>4} {len(lambda_space(n)):>7}")
    print("lambda(3):", ", ".join(str(F) for F in lambda_space(3)))


if __name__ == "__main__":
    main()
