"""知识超图补全：HypE / HSimplE 及基线模型的训练、评估与数据转换。"""
