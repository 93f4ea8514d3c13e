def semantic_checker(data_dict, output_dict):
    positions = output_dict["queen_positions"]
    for a, b in positions:
        if a == b:
            raise ValueError("Queen on the main diagonal")
