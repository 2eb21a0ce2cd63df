__title__ = 'sewflow'
__description__ = 'Flows of maps from almost flows: the non-linear sewing lemma with validators, rate diagnostics and rough-path schemes.'
__keywords__ = 'sewing lemma, almost flow, rough path, young integral, signature, davie scheme',
__url__ = 'https://github.com/RedMaple96/sewflow'
__author__ = 'Devin'
__author_email__ = '175422668@qq.com'
__version__ = '0.3.0'
__license__ = 'MIT'
