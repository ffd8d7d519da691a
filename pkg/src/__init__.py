"""xtqm：扩展时空量子力学数值实验（源码目录，模块以顶层名互相导入）"""
