def semantic_checker(data_dict, output_dict):
    n = data_dict["n"]
    queens = output_dict["queens"]
    if len(set(queens)) != n:
        raise ValueError("Row conflict: two queens share a row")
    if len({r + c for c, r in enumerate(queens)}) != n or len({r - c for c, r in enumerate(queens)}) != n:
        raise ValueError("Diagonal conflict: two queens share a diagonal")
