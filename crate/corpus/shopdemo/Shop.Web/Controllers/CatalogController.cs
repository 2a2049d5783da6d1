using System;
using System.Web.Mvc;
using Shop.Business.Services;

namespace Shop.Web.Controllers
{
    public class CatalogController : Controller
    {
        private InventoryService inventory = new InventoryService();
        private CatalogService catalogService = new CatalogService();
        private ShippingService shipping = new ShippingService();

        public string ShowProduct(int productId)
        {
            int stock = inventory.Available(productId);
            decimal price = catalogService.PriceOf(productId);
            decimal freight = shipping.Estimate(productId);
            return price.ToString() + "/" + freight.ToString() + " (" + stock + ")";
        }
    }
}
